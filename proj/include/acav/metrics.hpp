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

// Corpus-level evaluation: reduction ratio, critical-frame recall and
// per-fault attribution scores.

#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "acav/cat.hpp"
#include "acav/scenario.hpp"
#include "acav/simplifier.hpp"

namespace acav
{

inline double reduction_ratio(const SimplificationResult & result, std::size_t total_frames)
{
  if (total_frames == 0) {
    throw InputError("reduction ratio of an empty recording");
  }
  if (result.kept.length() > total_frames) {
    throw InputError("kept segment longer than the recording");
  }
  return static_cast<double>(total_frames - result.kept.length()) / static_cast<double>(total_frames);
}

inline double critical_recall(const Segment & kept, const std::vector<std::size_t> & labels)
{
  if (labels.empty()) {
    throw InputError("critical recall needs at least one labelled frame");
  }
  const auto in = std::count_if(labels.begin(), labels.end(), [&](std::size_t f) { return kept.contains(f); });
  return static_cast<double>(in) / static_cast<double>(labels.size());
}

/// One analysed recording as seen by the classification metrics.
struct Attribution
{
  std::optional<FaultKind> fault;
  std::optional<CausalEventKind> expected;
  std::optional<CausalEventKind> detected;  // nullopt: empty report
};

struct FaultScores
{
  std::size_t n{0};
  std::size_t tp{0};
  std::size_t fp{0};
  double precision{0.0};
  double recall{0.0};
  double accuracy{0.0};
};

/// Per fault f with expected cause c(f):
///   TP  recordings injected with f whose main cause is c(f)
///   FP  recordings whose expected cause differs from c(f) but whose main cause is c(f)
///   precision = TP / (TP + FP), recall = TP / n_f, accuracy = TP / (n_f + FP)
/// Precision is 1 when nothing was detected; a missing detection counts against recall.
inline std::map<FaultKind, FaultScores> classification_metrics(const std::vector<Attribution> & corpus)
{
  if (corpus.empty()) {
    throw InputError("classification metrics need a non-empty corpus");
  }
  std::map<FaultKind, FaultScores> out;
  for (const auto & a : corpus) {
    if (a.fault) {
      auto & s = out[*a.fault];
      ++s.n;
      if (a.detected && a.detected == expected_main_cause(*a.fault)) {
        ++s.tp;
      }
    }
  }
  for (auto & [fault, s] : out) {
    const CausalEventKind c = expected_main_cause(fault);
    for (const auto & a : corpus) {
      if (a.detected == c && a.expected != c) {
        ++s.fp;
      }
    }
    s.precision = s.tp + s.fp == 0 ? 1.0 : static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp);
    s.recall = static_cast<double>(s.tp) / static_cast<double>(s.n);
    s.accuracy = static_cast<double>(s.tp) / static_cast<double>(s.n + s.fp);
  }
  return out;
}

/// Share of non-empty main-cause detections that match the expected cause.
inline double event_precision(const std::vector<Attribution> & corpus)
{
  std::size_t detected = 0;
  std::size_t correct = 0;
  for (const auto & a : corpus) {
    if (a.detected && a.expected) {
      ++detected;
      correct += a.detected == a.expected ? 1 : 0;
    }
  }
  return detected == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(detected);
}

struct CorpusEntry
{
  std::string id;
  std::size_t total_frames{0};  // frames up to and including the accident
  Segment kept;
  std::vector<std::size_t> critical_frames;
  Attribution attribution;
};

struct CorpusStats
{
  std::size_t n_recordings{0};
  std::size_t errors{0};
  double mean_reduction_ratio{0.0};
  double mean_critical_recall{0.0};
  double event_precision{1.0};
  std::map<FaultKind, FaultScores> per_fault;
  std::map<std::pair<std::string, std::string>, std::size_t> confusion;  // (expected, detected)
};

inline std::string cause_name(const std::optional<CausalEventKind> & k)
{
  return k ? std::string(to_string(*k)) : "none";
}

inline CorpusStats corpus_stats(const std::vector<CorpusEntry> & entries, std::size_t errors = 0)
{
  CorpusStats s;
  s.n_recordings = entries.size();
  s.errors = errors;
  if (entries.empty()) {
    return s;
  }
  double red = 0.0;
  double rec = 0.0;
  std::size_t n_rec = 0;
  std::vector<Attribution> attributions;
  for (const auto & e : entries) {
    SimplificationResult r;
    r.kept = e.kept;
    red += reduction_ratio(r, e.total_frames);
    if (!e.critical_frames.empty()) {
      rec += critical_recall(e.kept, e.critical_frames);
      ++n_rec;
    }
    attributions.push_back(e.attribution);
    if (e.attribution.expected) {
      ++s.confusion[{cause_name(e.attribution.expected), cause_name(e.attribution.detected)}];
    }
  }
  s.mean_reduction_ratio = red / static_cast<double>(entries.size());
  s.mean_critical_recall = n_rec == 0 ? 0.0 : rec / static_cast<double>(n_rec);
  s.event_precision = event_precision(attributions);
  s.per_fault = classification_metrics(attributions);
  return s;
}

inline nlohmann::json to_json(const CorpusStats & s)
{
  nlohmann::json j;
  j["n_recordings"] = s.n_recordings;
  j["errors"] = s.errors;
  j["mean_reduction_ratio"] = s.mean_reduction_ratio;
  j["mean_critical_recall"] = s.mean_critical_recall;
  j["event_precision"] = s.event_precision;
  nlohmann::json pf = nlohmann::json::object();
  for (const auto & [f, sc] : s.per_fault) {
    pf[std::string(to_string(f))] = {{"n", sc.n},           {"tp", sc.tp},
                                     {"fp", sc.fp},         {"precision", sc.precision},
                                     {"recall", sc.recall}, {"accuracy", sc.accuracy}};
  }
  j["per_fault"] = pf;
  nlohmann::json conf = nlohmann::json::array();
  for (const auto & [key, n] : s.confusion) {
    conf.push_back({{"expected", key.first}, {"detected", key.second}, {"count", n}});
  }
  j["confusion"] = conf;
  return j;
}

inline std::string stats_table(const CorpusStats & s)
{
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "recordings          %zu (errors: %zu)\n", s.n_recordings, s.errors);
  out += buf;
  std::snprintf(buf, sizeof(buf), "reduction ratio     %.2f%%\n", 100.0 * s.mean_reduction_ratio);
  out += buf;
  std::snprintf(buf, sizeof(buf), "critical recall     %.2f%%\n", 100.0 * s.mean_critical_recall);
  out += buf;
  std::snprintf(buf, sizeof(buf), "event precision     %.2f%%\n", 100.0 * s.event_precision);
  out += buf;
  if (!s.per_fault.empty()) {
    out += "\nfault                      n     precision  recall     accuracy\n";
    for (const auto & [f, sc] : s.per_fault) {
      std::snprintf(buf, sizeof(buf), "%-24s %4zu     %6.2f%%   %6.2f%%    %6.2f%%\n",
                    std::string(to_string(f)).c_str(), sc.n, 100.0 * sc.precision, 100.0 * sc.recall,
                    100.0 * sc.accuracy);
      out += buf;
    }
  }
  return out;
}

}  // namespace acav
