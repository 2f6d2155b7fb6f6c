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

// End-to-end analysis of one recording: truncate at the accident, simplify,
// find safety-critical frames, build ST graphs and attribute causal events.

#pragma once

#include <map>
#include <set>
#include <vector>

#include "acav/accident.hpp"
#include "acav/cat.hpp"
#include "acav/simplifier.hpp"
#include "acav/spec_checker.hpp"
#include "acav/st_graph.hpp"

namespace acav
{

struct AnalysisConfig
{
  SimplifierConfig simplifier{};
  FeatureConfig features{};
  DeviationConfig specs{};
  CatConfig cat{};

  /// Single prediction-error threshold shared by the checker and CAT.
  void set_th_err(double v)
  {
    specs.th_err = v;
    cat.th_err = v;
  }

  void validate() const
  {
    simplifier.validate();
    specs.validate();
    cat.validate();
  }
};

struct AnalysisResult
{
  AlignedRecording truncated;
  SimplificationResult simplification;
  std::vector<FrameViolations> safety_critical;
  std::map<std::size_t, StGraph> graphs;  // safety-critical frames only
  std::vector<FrameEvents> per_frame;
  CausalityReport report;
};

/// Throws NoAccidentError when the recording holds no collision.
inline AnalysisResult analyze(const AlignedRecording & rec, const AnalysisConfig & cfg = {})
{
  cfg.validate();
  AnalysisResult r;
  r.truncated = truncate_at_accident(rec);
  const AlignedRecording & tr = r.truncated;
  const Accident acc = *tr.accident;

  r.simplification = simplify(tr, cfg.simplifier, cfg.features);
  const Segment kept = r.simplification.kept;
  r.safety_critical = identify_safety_critical_frames(tr, kept, cfg.specs);

  std::map<std::size_t, const FrameViolations *> by_frame;
  for (const auto & fv : r.safety_critical) {
    by_frame[fv.frame] = &fv;
  }
  static const std::vector<SpecViolation> none;
  for (std::size_t i = kept.start; i <= kept.end; ++i) {
    if (tr.frames[i].planning.trajectory.size() < 2) {
      continue;
    }
    StGraph g = build_st_graph(tr, i, cfg.cat.st);
    auto it = by_frame.find(i);
    const bool critical = it != by_frame.end();
    auto events = deduce_frame(tr, i, &g, critical ? it->second->violations : none, acc.npc, critical, cfg.cat);
    if (!events.empty()) {
      r.per_frame.push_back({i, std::move(events)});
    }
    if (critical) {
      r.graphs.emplace(i, std::move(g));
    }
  }

  r.report = aggregate(r.per_frame, tr.frame_duration, kept.start, acc.frame);
  r.report.recording_id = tr.id;
  r.report.accident = AccidentInfo{acc.frame, r.report.time_of(acc.frame), acc.npc};
  return r;
}

}  // namespace acav
