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

// Propositional safety specifications evaluated per frame over state,
// deviation and maneuver variables. A satisfied specification marks a
// vulnerability; frames with at least one are safety-critical.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "acav/simplifier.hpp"
#include "acav/st_graph.hpp"

namespace acav
{

enum class SpecKind {
  improper_overtake,
  ignore_critical,
  prio_ignore_critical,
  traj_pred_error,
  speed_out_of_bounds,
  no_yield_vulnerable,
};
inline constexpr EnumNames<SpecKind, 6> kSpecKindNames{
  {"improper_overtake", "ignore_critical", "prio_ignore_critical", "traj_pred_error",
   "speed_out_of_bounds", "no_yield_vulnerable"}};
inline std::string_view to_string(SpecKind k) { return kSpecKindNames.to_string(k); }

inline SpecKind parse_spec_kind(std::string_view s)
{
  auto k = kSpecKindNames.parse(s);
  if (!k) {
    throw InputError("unknown specification '" + std::string(s) + "'");
  }
  return *k;
}

/// Kinds that flag a risky behavioural decision towards a specific NPC.
inline bool is_risky_decision(SpecKind k)
{
  return k == SpecKind::improper_overtake || k == SpecKind::ignore_critical ||
         k == SpecKind::no_yield_vulnerable;
}

struct DeviationConfig
{
  double th_err{2.0};
  double crit_factor{3.0};
  double blind_zone_min_deg{90.0};
  double blind_zone_max_deg{150.0};
  double blind_zone_radius{4.0};
  std::set<SpecKind> enabled{
    SpecKind::improper_overtake,   SpecKind::ignore_critical,     SpecKind::prio_ignore_critical,
    SpecKind::traj_pred_error,     SpecKind::speed_out_of_bounds, SpecKind::no_yield_vulnerable};

  void validate() const
  {
    if (!(th_err > 0.0)) {
      throw InputError("th_err must be positive");
    }
  }
};

struct StateVars
{
  double spd{0.0};
  bool onJct{false};
  bool onCswk{false};
  const PredictedTrajectory * predTraj{nullptr};
  bool isPed{false};
  bool isBcycl{false};
  bool bhndEV{false};
  bool blndEV{false};
};

struct ManeuverFlags
{
  bool prioIgn{false};
  bool decnIgn{false};
  bool decnFlw{false};
  bool decnYld{false};
  bool decnOvtk{false};

  int decision_count() const { return decnIgn + decnFlw + decnYld + decnOvtk; }
};

struct AvVars
{
  double spd{0.0};
  bool onJct{false};
  bool onCswk{false};
  double planned_min{0.0};
  double planned_max{0.0};
  double min_bound{0.0};
  double max_bound{0.0};
};

struct NpcEnv
{
  NpcId id{0};
  StateVars state;
  ManeuverFlags flags;
  double dist{0.0};
  std::optional<double> pred_error;  // Err(predTraj), filled when ground truth is available
};

struct FrameEnv
{
  std::size_t frame{0};
  AvVars av;
  std::vector<NpcEnv> npcs;
  std::vector<NpcId> partial;  // decided on by planning but not perceived

  const NpcEnv * find(NpcId id) const
  {
    auto it = std::find_if(npcs.begin(), npcs.end(), [id](const NpcEnv & n) { return n.id == id; });
    return it == npcs.end() ? nullptr : &*it;
  }
};

struct SpecViolation
{
  std::size_t frame{0};
  std::optional<NpcId> npc;
  SpecKind kind{SpecKind::improper_overtake};
  std::string detail;
};

struct FrameViolations
{
  std::size_t frame{0};
  double t{0.0};
  std::vector<SpecViolation> violations;
};

namespace detail
{

/// True when `p` lies behind the AV along the planned path (heading-based
/// fallback when the plan is too short to build a path).
inline bool behind_av(const Frame & frame, const std::optional<ReferencePath> & path, Vec2 p)
{
  if (path) {
    const double sp = path->project(p).s;
    const double sa = path->project(frame.localization.position()).s;
    if (std::abs(sp - sa) > 1e-9) {
      return sp < sa;
    }
    // Both clamp to the same station, typically the path start.
    return (p - frame.localization.position()).dot(Vec2::unit(path->heading_at(sa))) < 0.0;
  }
  return (p - frame.localization.position()).dot(Vec2::unit(frame.localization.heading)) < 0.0;
}

inline bool in_blind_zone(const Frame & frame, Vec2 p, const DeviationConfig & cfg)
{
  const Vec2 rel = p - frame.localization.position();
  if (rel.norm() >= cfg.blind_zone_radius) {
    return false;
  }
  const double bearing =
    std::abs(normalize_angle(std::atan2(rel.y, rel.x) - frame.localization.heading)) * 180.0 / M_PI;
  return bearing > cfg.blind_zone_min_deg && bearing < cfg.blind_zone_max_deg;
}

}  // namespace detail

inline FrameEnv build_env(const Frame & frame, const DeviationConfig & cfg = {})
{
  FrameEnv env;
  env.frame = frame.index;
  const MapContext & map = frame.map_context;
  env.av.spd = frame.localization.speed;
  env.av.onJct = map.on_junction;
  env.av.onCswk = map.on_crosswalk;
  env.av.min_bound = frame.planning.speed_limit_lo;
  env.av.max_bound = frame.planning.speed_limit_hi;
  if (!frame.planning.trajectory.empty()) {
    auto [lo, hi] = std::minmax_element(
      frame.planning.trajectory.begin(), frame.planning.trajectory.end(),
      [](const auto & a, const auto & b) { return a.planned_speed < b.planned_speed; });
    env.av.planned_min = lo->planned_speed;
    env.av.planned_max = hi->planned_speed;
  }

  std::optional<ReferencePath> path;
  if (frame.planning.trajectory.size() >= 2) {
    path = planned_reference_path(frame);
  }

  for (const auto & obs : frame.perception) {
    NpcEnv n;
    n.id = obs.npc_id;
    const Vec2 p = obs.footprint.center.position();
    n.dist = distance(frame.localization.position(), p);
    n.state.spd = obs.footprint.center.speed;
    n.state.onJct = map.inside(ZoneKind::junction, p);
    n.state.onCswk = map.inside(ZoneKind::crosswalk, p);
    n.state.predTraj = frame.find_prediction(obs.npc_id);
    n.state.isPed = obs.kind == ObstacleKind::pedestrian;
    n.state.isBcycl = obs.kind == ObstacleKind::bicyclist;
    n.state.bhndEV = detail::behind_av(frame, path, p);
    n.state.blndEV = detail::in_blind_zone(frame, p, cfg);
    n.flags.prioIgn = n.state.predTraj != nullptr && n.state.predTraj->priority == Priority::ignore;
    if (auto d = frame.decision_for(obs.npc_id)) {
      n.flags.decnIgn = *d == Decision::ignore;
      n.flags.decnFlw = *d == Decision::follow;
      n.flags.decnYld = *d == Decision::yield;
      n.flags.decnOvtk = *d == Decision::overtake;
    }
    env.npcs.push_back(n);
  }
  std::sort(env.npcs.begin(), env.npcs.end(), [](const auto & a, const auto & b) { return a.id < b.id; });
  for (const auto & [id, d] : frame.planning.decisions) {
    if (env.find(id) == nullptr) {
      env.partial.push_back(id);
    }
  }
  return env;
}

/// Fills Err(predTraj) for every NPC whose prediction overlaps the recording.
inline void attach_prediction_errors(FrameEnv & env, const AlignedRecording & rec, std::size_t frame_index)
{
  for (auto & n : env.npcs) {
    if (n.state.predTraj == nullptr) {
      continue;
    }
    try {
      n.pred_error = prediction_error(*n.state.predTraj, rec, frame_index);
    } catch (const InputError &) {
      n.pred_error.reset();
    }
  }
}

/// dist(av, x) < crit_factor * av.spd, strict.
inline bool crit_obst(const FrameEnv & env, const NpcEnv & npc, const DeviationConfig & cfg = {})
{
  return npc.dist < cfg.crit_factor * env.av.spd;
}

inline bool crit_obst(const Frame & frame, NpcId npc, const DeviationConfig & cfg = {})
{
  const auto * obs = frame.find_obstacle(npc);
  if (obs == nullptr) {
    return false;
  }
  return distance(frame.localization.position(), obs->footprint.center.position()) <
         cfg.crit_factor * frame.localization.speed;
}

/// Truth value of one specification for `npc` (ignored by frame-level specs).
inline bool eval_spec(
  SpecKind kind, const FrameEnv & env, const NpcEnv * npc, const DeviationConfig & cfg = {})
{
  if (kind == SpecKind::speed_out_of_bounds) {
    if (env.av.min_bound == 0.0 && env.av.max_bound == 0.0) {
      return false;  // no bounds published
    }
    constexpr double tol = 1e-6;
    return env.av.planned_max > env.av.max_bound + tol || env.av.planned_min < env.av.min_bound - tol;
  }
  if (npc == nullptr) {
    throw InputError(std::string("specification ") + std::string(to_string(kind)) + " needs an NPC");
  }
  const auto & x = npc->state;
  const auto & f = npc->flags;
  switch (kind) {
    case SpecKind::improper_overtake:
      return (env.av.onJct || env.av.onCswk) && f.decnOvtk;
    case SpecKind::ignore_critical:
      return crit_obst(env, *npc, cfg) && f.decnIgn;
    case SpecKind::prio_ignore_critical:
      return crit_obst(env, *npc, cfg) && f.prioIgn;
    case SpecKind::traj_pred_error:
      return crit_obst(env, *npc, cfg) && npc->pred_error && *npc->pred_error > cfg.th_err;
    case SpecKind::no_yield_vulnerable:
      return (x.isPed || x.isBcycl) && x.onCswk && !f.decnYld && !f.decnFlw;
    case SpecKind::speed_out_of_bounds:
      break;
  }
  throw InputError("unknown specification");
}

inline std::vector<SpecViolation> check_frame(const FrameEnv & env, const DeviationConfig & cfg = {})
{
  std::vector<SpecViolation> out;
  char buf[160];
  for (SpecKind k : cfg.enabled) {
    if (k == SpecKind::speed_out_of_bounds) {
      if (eval_spec(k, env, nullptr, cfg)) {
        std::snprintf(buf, sizeof(buf), "planned speed [%.2f, %.2f] m/s outside [%.2f, %.2f] m/s",
                      env.av.planned_min, env.av.planned_max, env.av.min_bound, env.av.max_bound);
        out.push_back({env.frame, std::nullopt, k, buf});
      }
      continue;
    }
    for (const auto & n : env.npcs) {
      if (!eval_spec(k, env, &n, cfg)) {
        continue;
      }
      switch (k) {
        case SpecKind::improper_overtake:
          std::snprintf(buf, sizeof(buf), "overtake decision for NPC %d while on %s", n.id,
                        env.av.onJct ? "junction" : "crosswalk");
          break;
        case SpecKind::ignore_critical:
          std::snprintf(buf, sizeof(buf), "ignore decision for critical NPC %d at %.1f m", n.id, n.dist);
          break;
        case SpecKind::prio_ignore_critical:
          std::snprintf(buf, sizeof(buf), "ignore priority for critical NPC %d at %.1f m", n.id, n.dist);
          break;
        case SpecKind::traj_pred_error:
          std::snprintf(buf, sizeof(buf), "prediction error %.2f m for NPC %d exceeds %.2f m",
                        *n.pred_error, n.id, cfg.th_err);
          break;
        case SpecKind::no_yield_vulnerable:
          std::snprintf(buf, sizeof(buf), "no yield to vulnerable NPC %d on crosswalk", n.id);
          break;
        case SpecKind::speed_out_of_bounds:
          break;
      }
      out.push_back({env.frame, n.id, k, buf});
    }
  }
  if (!env.partial.empty()) {
    std::string note = " (partial variable set: decided but not perceived:";
    for (NpcId id : env.partial) {
      note += " NPC " + std::to_string(id);
    }
    note += ")";
    for (auto & v : out) {
      v.detail += note;
    }
  }
  return out;
}

/// Evaluates every enabled specification on each frame of `kept`. Only frames
/// with at least one violation are returned, in index order.
inline std::vector<FrameViolations> identify_safety_critical_frames(
  const AlignedRecording & rec, const Segment & kept, const DeviationConfig & cfg = {})
{
  cfg.validate();
  std::vector<FrameViolations> out;
  for (std::size_t i = kept.start; i <= kept.end && i < rec.frames.size(); ++i) {
    FrameEnv env = build_env(rec.frames[i], cfg);
    if (cfg.enabled.count(SpecKind::traj_pred_error) != 0) {
      attach_prediction_errors(env, rec, i);
    }
    auto v = check_frame(env, cfg);
    if (!v.empty()) {
      out.push_back({i, rec.frames[i].t_start, std::move(v)});
    }
  }
  return out;
}

}  // namespace acav
