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

// Per-frame schema vectors: map, perception+prediction, planning.

#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "acav/recording.hpp"

namespace acav
{

struct FeatureConfig
{
  double map_near_distance{5.0};
  double near_distance{10.0};
  double approach_distance{30.0};
  double stopped_speed{0.1};
  double motion_band{0.3};
  double motion_lookahead{1.0};
};

enum class Motion { accelerating, cruising, braking, stopped };
inline constexpr EnumNames<Motion, 4> kMotionNames{{"accelerating", "cruising", "braking", "stopped"}};
inline std::string_view to_string(Motion m) { return kMotionNames.to_string(m); }

struct MapVector
{
  bool near_junction{false};
  bool near_crosswalk{false};
  bool near_stop_sign{false};
  TrafficSignal traffic_signal{TrafficSignal::none};
  bool operator==(const MapVector &) const = default;
};

struct PerceptionVector
{
  std::vector<NpcId> approaching;
  std::vector<NpcId> near;
  std::vector<NpcId> caution_predicted;
  std::vector<NpcId> ignore_predicted;
  bool operator==(const PerceptionVector &) const = default;
};

struct PlanningVector
{
  Decision main_decision{Decision::ignore};
  std::string odd;
  Motion motion{Motion::cruising};
  bool rss_safe{true};
  bool operator==(const PlanningVector &) const = default;
};

struct FrameVectors
{
  MapVector map;
  PerceptionVector perc;
  PlanningVector pln;
  bool operator==(const FrameVectors &) const = default;
};

inline MapVector extract_map_vector(const Frame & frame, const FeatureConfig & cfg = {})
{
  const MapContext & m = frame.map_context;
  auto near = [&](const std::optional<double> & d) { return d && *d < cfg.map_near_distance; };
  return {near(m.dist_to_junction), near(m.dist_to_crosswalk), near(m.dist_to_stop_sign),
          m.traffic_signal};
}

/// Rate at which the AV-NPC centre distance shrinks. Uses the previous frame
/// when it saw the same NPC, otherwise the relative velocity.
inline double closing_rate(const Frame & frame, const ObstacleObservation & obs, const Frame * prev)
{
  const Vec2 av = frame.localization.position();
  const Vec2 npc = obs.footprint.center.position();
  const double d = distance(av, npc);
  if (prev != nullptr) {
    const double dt = frame.t_start - prev->t_start;
    if (const auto * po = prev->find_obstacle(obs.npc_id); po != nullptr && dt > 0.0) {
      const double d_prev = distance(prev->localization.position(), po->footprint.center.position());
      return (d_prev - d) / dt;
    }
  }
  if (d <= 0.0) {
    return 0.0;
  }
  const Vec2 rel_p = npc - av;
  const Vec2 rel_v = obs.footprint.center.velocity() - frame.localization.velocity();
  return -rel_p.dot(rel_v) / d;
}

inline PerceptionVector extract_perception_vector(
  const Frame & frame, const Frame * prev = nullptr, const FeatureConfig & cfg = {})
{
  PerceptionVector v;
  const Vec2 av = frame.localization.position();
  for (const auto & obs : frame.perception) {
    const double d = distance(av, obs.footprint.center.position());
    if (d < cfg.near_distance) {
      v.near.push_back(obs.npc_id);
    }
    if (d < cfg.approach_distance && closing_rate(frame, obs, prev) > 0.0) {
      v.approaching.push_back(obs.npc_id);
    }
  }
  for (const auto & p : frame.prediction) {
    if (p.priority == Priority::caution) {
      v.caution_predicted.push_back(p.npc_id);
    } else if (p.priority == Priority::ignore) {
      v.ignore_predicted.push_back(p.npc_id);
    }
  }
  for (auto * list : {&v.approaching, &v.near, &v.caution_predicted, &v.ignore_predicted}) {
    std::sort(list->begin(), list->end());
    list->erase(std::unique(list->begin(), list->end()), list->end());
  }
  return v;
}

/// Planned speed at relative time t, linearly interpolated and clamped to the plan.
inline double planned_speed_at(const std::vector<TrajectoryPoint> & traj, double t)
{
  if (traj.empty()) {
    throw InputError("empty planned trajectory");
  }
  if (t <= traj.front().t) {
    return traj.front().planned_speed;
  }
  if (t >= traj.back().t) {
    return traj.back().planned_speed;
  }
  auto it = std::upper_bound(
    traj.begin(), traj.end(), t, [](double v, const TrajectoryPoint & p) { return v < p.t; });
  const auto & b = *it;
  const auto & a = *(it - 1);
  return a.planned_speed + (t - a.t) / (b.t - a.t) * (b.planned_speed - a.planned_speed);
}

inline PlanningVector extract_planning_vector(const Frame & frame, const FeatureConfig & cfg = {})
{
  const auto & plan = frame.planning;
  if (plan.trajectory.empty()) {
    throw InputError("frame " + std::to_string(frame.index) + ": empty planned trajectory");
  }
  PlanningVector v;
  v.main_decision = plan.main_decision;
  v.odd = plan.odd;
  v.rss_safe = plan.rss_safe;
  const double speed = frame.localization.speed;
  const double ahead = planned_speed_at(plan.trajectory, cfg.motion_lookahead);
  if (speed < cfg.stopped_speed) {
    v.motion = Motion::stopped;
  } else if (ahead - speed > cfg.motion_band) {
    v.motion = Motion::accelerating;
  } else if (ahead - speed < -cfg.motion_band) {
    v.motion = Motion::braking;
  } else {
    v.motion = Motion::cruising;
  }
  return v;
}

inline FrameVectors extract_frame_vectors(
  const Frame & frame, const Frame * prev = nullptr, const FeatureConfig & cfg = {})
{
  return {extract_map_vector(frame, cfg), extract_perception_vector(frame, prev, cfg),
          extract_planning_vector(frame, cfg)};
}

inline std::vector<FrameVectors> vectorize(const AlignedRecording & rec, const FeatureConfig & cfg = {})
{
  std::vector<FrameVectors> out;
  out.reserve(rec.frames.size());
  for (std::size_t i = 0; i < rec.frames.size(); ++i) {
    out.push_back(extract_frame_vectors(rec.frames[i], i > 0 ? &rec.frames[i - 1] : nullptr, cfg));
  }
  return out;
}

/// No map feature nearby, no NPC approaching or near, and no NPC predicted
/// with a caution or ignore priority.
inline bool is_irrelevant_frame(const FrameVectors & v)
{
  const bool quiet_map = !v.map.near_junction && !v.map.near_crosswalk && !v.map.near_stop_sign;
  const bool quiet_npcs = v.perc.approaching.empty() && v.perc.near.empty();
  const bool quiet_prediction = v.perc.caution_predicted.empty() && v.perc.ignore_predicted.empty();
  return quiet_map && quiet_npcs && quiet_prediction;
}

}  // namespace acav
