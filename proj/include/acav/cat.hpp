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

// Causal event deduction over the ST graph of each analyzed frame, and the
// aggregation of per-frame events into a causality report.

#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "acav/spec_checker.hpp"
#include "acav/st_graph.hpp"

namespace acav
{

/// Declaration order is the tie-break order of the deduction procedure.
enum class CausalEventKind {
  wrong_priority_prediction,
  wrong_trajectory_prediction,
  wrong_behavioral_planning,
  wrong_motion_planning,
  vehicle_out_of_control,
};
inline constexpr EnumNames<CausalEventKind, 5> kCausalEventKindNames{
  {"wrong_priority_prediction", "wrong_trajectory_prediction", "wrong_behavioral_planning",
   "wrong_motion_planning", "vehicle_out_of_control"}};
inline constexpr std::size_t kCausalEventKindCount = 5;
inline std::string_view to_string(CausalEventKind k) { return kCausalEventKindNames.to_string(k); }

inline std::string_view label(CausalEventKind k)
{
  static constexpr std::array<std::string_view, kCausalEventKindCount> labels{
    "Wrong priority prediction", "Wrong trajectory prediction", "Wrong behavioral planning",
    "Wrong motion planning", "Vehicle out of control"};
  return labels[static_cast<std::size_t>(k)];
}

struct CausalEvent
{
  CausalEventKind kind{CausalEventKind::wrong_motion_planning};
  std::optional<NpcId> npc;
  std::size_t frame_start{0};
  std::size_t frame_end{0};
  std::string detail;
};

struct CatConfig
{
  double th_err{2.0};
  double deviation_threshold{0.5};
  double deviation_horizon{1.0};
  StGraphConfig st{};

  void validate() const
  {
    if (!(th_err > 0.0 && deviation_threshold > 0.0 && deviation_horizon > 0.0 && st.horizon > 0.0)) {
      throw InputError("CAT thresholds must be positive");
    }
  }
};

struct OutOfControl
{
  bool flagged{false};
  double deviation{0.0};
  bool truncated{false};  // no future frame inside the deviation horizon
};

/// Largest distance between the recorded AV position and the frame's plan
/// over the next `deviation_horizon` seconds.
inline OutOfControl detect_out_of_control(
  const AlignedRecording & rec, std::size_t frame_index, const CatConfig & cfg = {})
{
  const Frame & f = rec.frames.at(frame_index);
  OutOfControl out;
  const auto & traj = f.planning.trajectory;
  bool any = false;
  for (std::size_t j = frame_index + 1; j < rec.frames.size(); ++j) {
    const double dt = rec.frames[j].t_start - f.t_start;
    if (dt > cfg.deviation_horizon + 1e-9) {
      break;
    }
    if (traj.empty() || dt > traj.back().t + 1e-9) {
      break;
    }
    auto it = std::upper_bound(
      traj.begin(), traj.end(), dt, [](double v, const TrajectoryPoint & p) { return v < p.t; });
    Vec2 p;
    if (it == traj.begin()) {
      p = traj.front().pose.position();
    } else if (it == traj.end()) {
      p = traj.back().pose.position();
    } else {
      const auto & b = *it;
      const auto & a = *(it - 1);
      const double r = (dt - a.t) / (b.t - a.t);
      p = a.pose.position() + (b.pose.position() - a.pose.position()) * r;
    }
    out.deviation = std::max(out.deviation, distance(p, rec.frames[j].ground_truth.av.center.position()));
    any = true;
  }
  out.truncated = !any;
  out.flagged = any && out.deviation > cfg.deviation_threshold;
  return out;
}

namespace detail
{

inline bool hits(const StCurve & curve, const StBlock * block, double tol)
{
  return block != nullptr && curve_block_intersect(curve, *block, tol).has_value();
}

inline std::string fmt(const char * f, double a)
{
  char buf[96];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

inline std::string risky_detail(const std::vector<SpecViolation> & vs, NpcId npc)
{
  for (const auto & v : vs) {
    if (v.npc && *v.npc == npc && is_risky_decision(v.kind)) {
      switch (v.kind) {
        case SpecKind::improper_overtake:
          return "risky 'overtake' decision.";
        case SpecKind::ignore_critical:
          return "risky 'ignore' decision on a critical NPC.";
        case SpecKind::no_yield_vulnerable:
          return "no 'yield' decision towards a vulnerable road user.";
        default:
          break;
      }
    }
  }
  return {};
}

}  // namespace detail

inline constexpr std::string_view kMotionDetail = "planned speed profile runs into the obstacle block.";

/// Causal events of a single frame (spans of length one).
///
/// On safety-critical frames the accident NPC walks the ordered checks
/// priority -> trajectory -> behavioural -> motion planning; other NPCs whose
/// perceived block the plan crosses yield behavioural or motion events. The
/// out-of-control check runs on every frame whose plan crosses no block.
inline std::vector<CausalEvent> deduce_frame(
  const AlignedRecording & rec, std::size_t frame_index, const StGraph * st,
  const std::vector<SpecViolation> & violations, NpcId accident_npc, bool safety_critical,
  const CatConfig & cfg = {})
{
  if (st == nullptr) {
    throw InputError("frame " + std::to_string(frame_index) + ": missing ST graph");
  }
  const Frame & frame = rec.frames.at(frame_index);
  const double tol = cfg.st.intersect_tolerance;
  std::vector<CausalEvent> out;
  auto emit = [&](CausalEventKind k, std::optional<NpcId> npc, std::string detail) {
    out.push_back({k, npc, frame_index, frame_index, std::move(detail)});
  };
  auto has_risky = [&](NpcId npc) {
    return std::any_of(violations.begin(), violations.end(), [&](const SpecViolation & v) {
      return v.npc && *v.npc == npc && is_risky_decision(v.kind);
    });
  };

  if (safety_critical) {
    const auto * pred = frame.find_prediction(accident_npc);
    const bool hit_perceived = detail::hits(st->curve, st->find(BlockSource::perceived, accident_npc), tol);
    const bool hit_truth = detail::hits(st->curve, st->find(BlockSource::ground_truth, accident_npc), tol);
    if (pred != nullptr && pred->priority == Priority::ignore) {
      emit(CausalEventKind::wrong_priority_prediction, accident_npc, "priority predicted as 'ignore'.");
    } else if (!hit_perceived && hit_truth) {
      std::string d = "predicted trajectory misses the recorded one";
      if (pred != nullptr) {
        try {
          const double err = prediction_error(*pred, rec, frame_index);
          d += detail::fmt(" (error %.2f m", err);
          d += err > cfg.th_err ? ", above threshold)" : ")";
        } catch (const InputError &) {
        }
      }
      emit(CausalEventKind::wrong_trajectory_prediction, accident_npc, d + ".");
    } else if (hit_perceived && has_risky(accident_npc)) {
      emit(CausalEventKind::wrong_behavioral_planning, accident_npc,
           detail::risky_detail(violations, accident_npc));
    } else if (hit_perceived) {
      emit(CausalEventKind::wrong_motion_planning, accident_npc, std::string(kMotionDetail));
    }

    for (const auto & block : st->perceived) {
      if (block.npc_id == accident_npc || !detail::hits(st->curve, &block, tol)) {
        continue;
      }
      if (has_risky(block.npc_id)) {
        emit(CausalEventKind::wrong_behavioral_planning, block.npc_id,
             detail::risky_detail(violations, block.npc_id));
      } else {
        emit(CausalEventKind::wrong_motion_planning, block.npc_id, std::string(kMotionDetail));
      }
    }
  }

  const auto crosses = [&](const std::vector<StBlock> & blocks) {
    return std::any_of(blocks.begin(), blocks.end(), [&](const StBlock & b) {
      return detail::hits(st->curve, &b, tol);
    });
  };
  if (!crosses(st->perceived) && !crosses(st->truth)) {
    const auto ooc = detect_out_of_control(rec, frame_index, cfg);
    if (ooc.flagged) {
      emit(CausalEventKind::vehicle_out_of_control, std::nullopt,
           detail::fmt("actual trajectory deviates %.2f m from the plan.", ooc.deviation));
    }
  }
  return out;
}

struct FrameEvents
{
  std::size_t frame{0};
  std::vector<CausalEvent> events;
};

struct TimelineEntry
{
  std::size_t frame{0};
  double t{0.0};
  std::vector<CausalEventKind> kinds;
};

struct AccidentInfo
{
  std::size_t frame{0};
  double t{0.0};
  NpcId npc{0};
};

struct CausalityReport
{
  std::string recording_id;
  std::optional<AccidentInfo> accident;
  std::vector<CausalEvent> events;
  std::optional<CausalEventKind> main_cause;
  std::vector<TimelineEntry> timeline;
  std::size_t window_start{0};
  double frame_duration{kDefaultFrameDuration};
  std::array<double, kCausalEventKindCount> durations{};

  double time_of(std::size_t frame) const
  {
    return static_cast<double>(frame - window_start) * frame_duration;
  }
};

/// Merges consecutive frames carrying the same (kind, npc) into spans, sums
/// span durations per kind, picks the main cause (longest total, ties by
/// kind order) and lists the transitions of the active kind set.
/// `window_end` is the last frame of the analysis window (the accident frame).
inline CausalityReport aggregate(
  const std::vector<FrameEvents> & per_frame, double frame_duration, std::size_t window_start,
  std::size_t window_end)
{
  CausalityReport r;
  r.frame_duration = frame_duration;
  r.window_start = window_start;

  using Key = std::pair<CausalEventKind, std::optional<NpcId>>;
  std::map<Key, CausalEvent> open;
  std::vector<CausalEvent> closed;
  std::map<std::size_t, std::set<CausalEventKind>> active;
  std::vector<FrameEvents> sorted = per_frame;
  std::sort(sorted.begin(), sorted.end(), [](const auto & a, const auto & b) { return a.frame < b.frame; });
  for (const auto & fe : sorted) {
    for (const auto & e : fe.events) {
      active[fe.frame].insert(e.kind);
      const Key key{e.kind, e.npc};
      auto it = open.find(key);
      if (it != open.end() && it->second.frame_end + 1 == fe.frame) {
        it->second.frame_end = fe.frame;
      } else if (it != open.end() && it->second.frame_end == fe.frame) {
        // duplicate within one frame
      } else {
        if (it != open.end()) {
          closed.push_back(it->second);
          open.erase(it);
        }
        CausalEvent span = e;
        span.frame_start = span.frame_end = fe.frame;
        open.emplace(key, std::move(span));
      }
    }
  }
  for (auto & [k, e] : open) {
    closed.push_back(std::move(e));
  }
  std::sort(closed.begin(), closed.end(), [](const CausalEvent & a, const CausalEvent & b) {
    return std::tie(a.frame_start, a.kind, a.npc, a.frame_end) <
           std::tie(b.frame_start, b.kind, b.npc, b.frame_end);
  });
  r.events = std::move(closed);

  for (const auto & e : r.events) {
    r.durations[static_cast<std::size_t>(e.kind)] +=
      static_cast<double>(e.frame_end - e.frame_start + 1) * frame_duration;
  }
  for (std::size_t k = 0; k < kCausalEventKindCount; ++k) {
    if (r.durations[k] > 0.0 &&
        (!r.main_cause || r.durations[k] > r.durations[static_cast<std::size_t>(*r.main_cause)])) {
      r.main_cause = static_cast<CausalEventKind>(k);
    }
  }

  std::optional<std::set<CausalEventKind>> last;
  for (std::size_t f = window_start; f <= window_end; ++f) {
    std::set<CausalEventKind> now;
    if (auto it = active.find(f); it != active.end()) {
      now = it->second;
    }
    if (!last || now != *last) {
      r.timeline.push_back({f, r.time_of(f), {now.begin(), now.end()}});
      last = now;
    }
  }
  return r;
}

}  // namespace acav
