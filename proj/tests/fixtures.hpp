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

// Hand-built frames and recordings for unit tests.

#pragma once

#include <string>
#include <vector>

#include "acav/acav.hpp"

namespace fixture
{

using namespace acav;

inline Pose pose(double x, double y, double heading = 0.0, double speed = 0.0)
{
  Pose p;
  p.x = x;
  p.y = y;
  p.heading = heading;
  p.speed = speed;
  return p;
}

/// Straight plan along +x from `p` at constant speed, one point per 0.1 s.
inline std::vector<TrajectoryPoint> straight_plan(const Pose & p, double speed, double horizon = 8.0)
{
  std::vector<TrajectoryPoint> out;
  for (int k = 0; 0.1 * k <= horizon + 1e-9; ++k) {
    const double t = 0.1 * k;
    TrajectoryPoint tp;
    tp.t = t;
    tp.pose = pose(p.x + speed * t * std::cos(p.heading), p.y + speed * t * std::sin(p.heading), p.heading, speed);
    tp.planned_speed = speed;
    out.push_back(tp);
  }
  return out;
}

/// AV at `av` with a straight plan at its own speed and nothing around it.
inline Frame frame(std::size_t index, double t, const Pose & av)
{
  Frame f;
  f.index = index;
  f.t_start = t;
  f.localization = av;
  f.planning.trajectory = straight_plan(av, av.speed);
  f.planning.main_decision = Decision::ignore;
  f.planning.odd = "lane_follow";
  f.ground_truth.av = Footprint{av, 4.9, 2.1};
  return f;
}

inline ObstacleObservation obstacle(NpcId id, const Pose & p, ObstacleKind kind = ObstacleKind::vehicle)
{
  ObstacleObservation o;
  o.npc_id = id;
  o.footprint = Footprint{p, 4.5, 2.0};
  o.kind = kind;
  o.is_static = p.speed == 0.0;
  return o;
}

/// Perceived and ground-truth NPC in one go.
inline void add_npc(Frame & f, NpcId id, const Pose & p, ObstacleKind kind = ObstacleKind::vehicle)
{
  f.perception.push_back(obstacle(id, p, kind));
  f.ground_truth.npc_states[id] = Footprint{p, 4.5, 2.0};
}

/// Constant-velocity prediction over `horizon` seconds.
inline PredictedTrajectory prediction(NpcId id, const Pose & p, Priority prio = Priority::normal, double horizon = 8.0)
{
  PredictedTrajectory pt;
  pt.npc_id = id;
  pt.priority = prio;
  for (int k = 0; 0.2 * k <= horizon + 1e-9; ++k) {
    const double t = 0.2 * k;
    pt.waypoints.push_back(
      {t, pose(p.x + p.speed * t * std::cos(p.heading), p.y + p.speed * t * std::sin(p.heading), p.heading, p.speed)});
  }
  return pt;
}

/// AV driving along +x at `speed` for `n` frames.
inline AlignedRecording cruise(std::size_t n, double speed, double d = kDefaultFrameDuration)
{
  AlignedRecording rec;
  rec.id = "cruise";
  rec.frame_duration = d;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * d;
    rec.frames.push_back(frame(i, t, pose(speed * t, 0.0, 0.0, speed)));
  }
  return rec;
}

}  // namespace fixture
