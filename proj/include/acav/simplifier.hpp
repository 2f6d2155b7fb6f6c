// Copyright 2026 The ACAV Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Recording simplification: weighted-vote segmentation of the vectorized
// recording, then backward pruning of irrelevant segments.
//
// Indexing: frames are 0-based here. The published procedure numbers frames
// 1..n; frame k there is index k-1 here. A cut at frame i (1-based) closes the
// previous segment at i-1 and opens a new one at i; the final frame always
// votes in every category and closes the last segment.

#pragma once

#include <algorithm>
#include <vector>

#include "acav/features.hpp"

namespace acav
{

struct VotingWeights
{
  double w_map{1.0};
  double w_perc{1.0};
  double w_pln{2.0};

  double total() const { return w_map + w_perc + w_pln; }

  void validate() const
  {
    if (w_map < 0.0 || w_perc < 0.0 || w_pln < 0.0) {
      throw InputError("voting weights must be non-negative");
    }
    if (total() <= 0.0) {
      throw InputError("voting weights must not all be zero");
    }
  }
};

struct VoteTuple
{
  bool v_map{false};
  bool v_perc{false};
  bool v_pln{false};
  bool operator==(const VoteTuple &) const = default;
};

struct Segment
{
  std::size_t start{0};  // inclusive
  std::size_t end{0};    // inclusive

  std::size_t length() const { return end - start + 1; }
  bool contains(std::size_t i) const { return start <= i && i <= end; }
  bool operator==(const Segment &) const = default;
};

struct SimplifierConfig
{
  VotingWeights weights{};
  double th_m{0.8};

  void validate() const
  {
    weights.validate();
    if (th_m < 0.0 || th_m > 1.0) {
      throw InputError("th_m must lie in [0, 1]");
    }
  }
};

struct SimplificationResult
{
  Segment kept;
  double reduction_ratio{0.0};
  std::vector<Segment> segments_all;
};

/// A frame is a clipping point when the weighted votes reach half the total weight.
inline bool vote(const VoteTuple & v, const VotingWeights & w)
{
  const double score = w.w_map * v.v_map + w.w_perc * v.v_perc + w.w_pln * v.v_pln;
  return score >= 0.5 * w.total();
}

/// Votes for 0-based frame i (1 <= i < n): a category votes when its vector
/// differs from frame i-1, and every category votes on the last frame.
inline VoteTuple compute_votes(const std::vector<FrameVectors> & vectors, std::size_t i)
{
  if (i == 0 || i >= vectors.size()) {
    throw InputError("vote index " + std::to_string(i) + " out of range");
  }
  if (i + 1 == vectors.size()) {
    return {true, true, true};
  }
  const auto & cur = vectors[i];
  const auto & prev = vectors[i - 1];
  return {cur.map != prev.map, cur.perc != prev.perc, cur.pln != prev.pln};
}

inline std::vector<Segment> segment_recording(
  const std::vector<FrameVectors> & vectors, const SimplifierConfig & cfg = {})
{
  if (vectors.empty()) {
    throw InputError("cannot segment an empty recording");
  }
  cfg.validate();
  const std::size_t n = vectors.size();
  std::vector<Segment> out;
  std::size_t seg_start = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (vote(compute_votes(vectors, i), cfg.weights)) {
      out.push_back({seg_start, i - 1});
      seg_start = i;
    }
  }
  out.push_back({seg_start, n - 1});
  return out;
}

inline double irrelevant_ratio(const Segment & seg, const std::vector<FrameVectors> & vectors)
{
  if (seg.end >= vectors.size() || seg.start > seg.end) {
    throw InputError("segment out of range");
  }
  const auto first = vectors.begin() + static_cast<std::ptrdiff_t>(seg.start);
  const auto last = vectors.begin() + static_cast<std::ptrdiff_t>(seg.end) + 1;
  const auto count = std::count_if(first, last, is_irrelevant_frame);
  return static_cast<double>(count) / static_cast<double>(seg.length());
}

/// Backward scan from the last segment. A segment is merged only when its
/// irrelevant ratio is at most th_m and it directly precedes the kept range;
/// once a discarded segment breaks contiguity nothing earlier can merge.
inline Segment prune_segments(
  const std::vector<Segment> & segments, const std::vector<FrameVectors> & vectors,
  const SimplifierConfig & cfg = {})
{
  if (segments.empty()) {
    throw InputError("no segments to prune");
  }
  Segment kept = segments.back();
  for (auto it = segments.rbegin() + 1; it != segments.rend(); ++it) {
    if (irrelevant_ratio(*it, vectors) <= cfg.th_m && it->end + 1 == kept.start) {
      kept.start = it->start;
    }
  }
  return kept;
}

inline SimplificationResult simplify_vectors(
  const std::vector<FrameVectors> & vectors, const SimplifierConfig & cfg = {})
{
  SimplificationResult r;
  r.segments_all = segment_recording(vectors, cfg);
  r.kept = prune_segments(r.segments_all, vectors, cfg);
  const auto n = static_cast<double>(vectors.size());
  r.reduction_ratio = (n - static_cast<double>(r.kept.length())) / n;
  return r;
}

/// Expects a recording already truncated at its accident frame.
inline SimplificationResult simplify(
  const AlignedRecording & rec, const SimplifierConfig & cfg = {}, const FeatureConfig & fcfg = {})
{
  return simplify_vectors(vectorize(rec, fcfg), cfg);
}

}  // namespace acav
