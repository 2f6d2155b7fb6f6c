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

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acav/common.hpp"
#include "acav/geometry.hpp"

namespace acav
{

inline constexpr double kDefaultFrameDuration = 0.08;

struct Pose
{
  double x{0.0};
  double y{0.0};
  double heading{0.0};  // radians, [-pi, pi]
  double speed{0.0};    // m/s, >= 0

  Vec2 position() const { return {x, y}; }
  Vec2 velocity() const { return Vec2::unit(heading) * speed; }
  bool operator==(const Pose &) const = default;
};

struct Footprint
{
  Pose center;
  double length{4.5};
  double width{2.0};

  OrientedBox box() const { return {center.position(), center.heading, length, width}; }
  bool operator==(const Footprint &) const = default;
};

struct ObstacleObservation
{
  NpcId npc_id{0};
  Footprint footprint;
  ObstacleKind kind{ObstacleKind::vehicle};
  bool is_static{false};
  bool operator==(const ObstacleObservation &) const = default;
};

struct TimedPose
{
  double t{0.0};  // seconds relative to the message time
  Pose pose;
  bool operator==(const TimedPose &) const = default;
};

struct PredictedTrajectory
{
  NpcId npc_id{0};
  Priority priority{Priority::normal};
  std::vector<TimedPose> waypoints;
  bool operator==(const PredictedTrajectory &) const = default;
};

struct TrajectoryPoint
{
  double t{0.0};  // seconds relative to the message time
  Pose pose;
  double planned_speed{0.0};
  bool operator==(const TrajectoryPoint &) const = default;
};

struct PlanningMessage
{
  std::vector<TrajectoryPoint> trajectory;
  std::map<NpcId, Decision> decisions;
  Decision main_decision{Decision::ignore};
  std::string odd;
  bool rss_safe{true};
  double speed_limit_lo{0.0};
  double speed_limit_hi{0.0};
  bool operator==(const PlanningMessage &) const = default;
};

enum class ZoneKind { junction, crosswalk };
inline constexpr EnumNames<ZoneKind, 2> kZoneKindNames{{"junction", "crosswalk"}};

/// Map area the analyzer can test NPC positions against.
struct MapZone
{
  ZoneKind kind{ZoneKind::junction};
  OrientedBox area;
  bool operator==(const MapZone & o) const
  {
    return kind == o.kind && area.center == o.area.center && area.heading == o.area.heading &&
           area.length == o.area.length && area.width == o.area.width;
  }
};

struct MapContext
{
  std::optional<double> dist_to_junction;
  std::optional<double> dist_to_crosswalk;
  std::optional<double> dist_to_stop_sign;
  TrafficSignal traffic_signal{TrafficSignal::none};
  bool on_junction{false};
  bool on_crosswalk{false};
  std::vector<MapZone> zones;

  bool inside(ZoneKind kind, Vec2 p) const
  {
    return std::any_of(zones.begin(), zones.end(), [&](const MapZone & z) {
      return z.kind == kind && z.area.contains(p);
    });
  }
  bool operator==(const MapContext &) const = default;
};

struct GroundTruthState
{
  Footprint av;
  std::map<NpcId, Footprint> npc_states;
  bool operator==(const GroundTruthState &) const = default;
};

struct Frame
{
  std::size_t index{0};
  double t_start{0.0};
  Pose localization;
  std::vector<ObstacleObservation> perception;
  std::vector<PredictedTrajectory> prediction;
  PlanningMessage planning;
  MapContext map_context;
  GroundTruthState ground_truth;

  const ObstacleObservation * find_obstacle(NpcId id) const
  {
    auto it = std::find_if(
      perception.begin(), perception.end(), [id](const auto & o) { return o.npc_id == id; });
    return it == perception.end() ? nullptr : &*it;
  }

  const PredictedTrajectory * find_prediction(NpcId id) const
  {
    auto it = std::find_if(
      prediction.begin(), prediction.end(), [id](const auto & p) { return p.npc_id == id; });
    return it == prediction.end() ? nullptr : &*it;
  }

  std::optional<Decision> decision_for(NpcId id) const
  {
    auto it = planning.decisions.find(id);
    if (it == planning.decisions.end()) {
      return std::nullopt;
    }
    return it->second;
  }
};

struct Accident
{
  std::size_t frame{0};
  NpcId npc{0};
  bool operator==(const Accident &) const = default;
};

struct AlignedRecording
{
  std::string id;
  std::vector<Frame> frames;
  double frame_duration{kDefaultFrameDuration};
  std::optional<Accident> accident;

  std::size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
};

// Invariant checks shared by the parser and the scenario forge.

inline bool times_strictly_increasing(const std::vector<TimedPose> & w)
{
  return std::adjacent_find(w.begin(), w.end(), [](const auto & a, const auto & b) {
           return !(a.t < b.t);
         }) == w.end();
}

inline bool times_strictly_increasing(const std::vector<TrajectoryPoint> & w)
{
  return std::adjacent_find(w.begin(), w.end(), [](const auto & a, const auto & b) {
           return !(a.t < b.t);
         }) == w.end();
}

/// Linear interpolation of a timed pose list at relative time t. Clamps to the ends.
inline Pose interpolate_pose(const std::vector<TimedPose> & w, double t)
{
  if (w.empty()) {
    return {};
  }
  if (t <= w.front().t) {
    return w.front().pose;
  }
  if (t >= w.back().t) {
    return w.back().pose;
  }
  auto it = std::upper_bound(
    w.begin(), w.end(), t, [](double v, const TimedPose & p) { return v < p.t; });
  const TimedPose & b = *it;
  const TimedPose & a = *(it - 1);
  const double r = (t - a.t) / (b.t - a.t);
  Pose p;
  p.x = a.pose.x + r * (b.pose.x - a.pose.x);
  p.y = a.pose.y + r * (b.pose.y - a.pose.y);
  p.heading = normalize_angle(a.pose.heading + r * normalize_angle(b.pose.heading - a.pose.heading));
  p.speed = a.pose.speed + r * (b.pose.speed - a.pose.speed);
  return p;
}

}  // namespace acav
