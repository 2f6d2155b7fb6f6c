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

// Synthetic scenario forge: scripted NPC kinematics, a rule-following AV
// planner, critical-frame labels and planner/predictor fault injection.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "acav/accident.hpp"
#include "acav/cat.hpp"
#include "acav/features.hpp"
#include "acav/frenet.hpp"
#include "acav/recording_io.hpp"
#include "acav/st_graph.hpp"

namespace acav
{

enum class Archetype { intersection, merging, tailgating };
inline constexpr EnumNames<Archetype, 3> kArchetypeNames{{"intersection", "merging", "tailgating"}};
inline std::string_view to_string(Archetype a) { return kArchetypeNames.to_string(a); }

inline Archetype parse_archetype(std::string_view s)
{
  if (auto a = kArchetypeNames.parse(s)) {
    return *a;
  }
  throw InputError("unknown archetype '" + std::string(s) + "'");
}

enum class FaultKind {
  f1_ignore_all_priority,
  f2_wrong_traj_model,
  f3_ignore_static,
  f4_follow_stopping,
  f5_ignore_ahead,
  f6_yield_fast,
  f7_overtake_all,
  f8_high_speed_near,
};
inline constexpr EnumNames<FaultKind, 8> kFaultKindNames{
  {"f1_ignore_all_priority", "f2_wrong_traj_model", "f3_ignore_static", "f4_follow_stopping",
   "f5_ignore_ahead", "f6_yield_fast", "f7_overtake_all", "f8_high_speed_near"}};
inline std::string_view to_string(FaultKind f) { return kFaultKindNames.to_string(f); }

/// Accepts the full name or its short prefix ("f7").
inline FaultKind parse_fault(std::string_view s)
{
  if (auto f = kFaultKindNames.parse(s)) {
    return *f;
  }
  for (std::size_t i = 0; i < kFaultKindNames.names.size(); ++i) {
    const auto name = kFaultKindNames.names[i];
    if (name.substr(0, name.find('_')) == s) {
      return static_cast<FaultKind>(i);
    }
  }
  throw InputError("unknown fault '" + std::string(s) + "'");
}

inline CausalEventKind expected_main_cause(FaultKind f)
{
  switch (f) {
    case FaultKind::f1_ignore_all_priority:
      return CausalEventKind::wrong_priority_prediction;
    case FaultKind::f2_wrong_traj_model:
      return CausalEventKind::wrong_trajectory_prediction;
    case FaultKind::f8_high_speed_near:
      return CausalEventKind::wrong_motion_planning;
    default:
      return CausalEventKind::wrong_behavioral_planning;
  }
}

struct ScriptPoint
{
  double t{0.0};
  double x{0.0};
  double y{0.0};
};

/// NPC moving along piecewise-linear waypoints; present only between the
/// first and last waypoint times.
struct NpcScript
{
  NpcId id{0};
  ObstacleKind kind{ObstacleKind::vehicle};
  double length{4.5};
  double width{2.0};
  double heading{0.0};  // used while the NPC does not move
  std::vector<ScriptPoint> waypoints;

  std::optional<Footprint> footprint_at(double t) const
  {
    if (waypoints.empty() || t < waypoints.front().t - 1e-9 || t > waypoints.back().t + 1e-9) {
      return std::nullopt;
    }
    Footprint f;
    f.length = length;
    f.width = width;
    if (waypoints.size() == 1) {
      f.center = {waypoints[0].x, waypoints[0].y, normalize_angle(heading), 0.0};
      return f;
    }
    std::size_t k = 0;
    while (k + 2 < waypoints.size() && t > waypoints[k + 1].t) {
      ++k;
    }
    const ScriptPoint & a = waypoints[k];
    const ScriptPoint & b = waypoints[k + 1];
    const double dt = b.t - a.t;
    const double r = std::clamp((t - a.t) / dt, 0.0, 1.0);
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len = std::hypot(dx, dy);
    f.center.x = a.x + r * dx;
    f.center.y = a.y + r * dy;
    f.center.speed = len / dt;
    f.center.heading = len > 1e-9 ? std::atan2(dy, dx) : normalize_angle(heading);
    if (len <= 1e-9) {
      // Hold the heading of the last moving segment.
      for (std::size_t j = k; j-- > 0;) {
        const double ex = waypoints[j + 1].x - waypoints[j].x;
        const double ey = waypoints[j + 1].y - waypoints[j].y;
        if (std::hypot(ex, ey) > 1e-9) {
          f.center.heading = std::atan2(ey, ex);
          break;
        }
      }
    }
    return f;
  }
};

struct SkidModel
{
  double onset{0.0};       // s
  double drift_rate{0.0};  // lateral m/s once skidding
};

struct RoadMap
{
  std::vector<MapZone> zones;
  std::vector<Vec2> stop_signs;
  double speed_limit{12.0};
};

struct AvSetup
{
  std::vector<Vec2> route;
  double start_s{0.0};
  double speed{12.0};
  double length{4.9};
  double width{2.1};
};

struct ScenarioSpec
{
  std::uint64_t seed{0};
  Archetype archetype{Archetype::intersection};
  RoadMap map;
  AvSetup av;
  std::vector<NpcScript> npcs;
  std::optional<SkidModel> skid;
  double duration{20.0};
  double frame_duration{kDefaultFrameDuration};

  void validate() const
  {
    if (av.route.size() < 2) {
      throw InputError("degenerate route: need at least two points");
    }
    ReferencePath check(av.route);
    if (!(duration > 0.0) || !(frame_duration > 0.0)) {
      throw InputError("duration and frame duration must be positive");
    }
    if (!(map.speed_limit > 0.0) || av.speed < 0.0) {
      throw InputError("speed limit must be positive and AV speed non-negative");
    }
    for (const auto & n : npcs) {
      if (n.waypoints.empty() || !(n.length > 0.0) || !(n.width > 0.0)) {
        throw InputError("npc " + std::to_string(n.id) + ": needs waypoints and positive size");
      }
      for (std::size_t k = 1; k < n.waypoints.size(); ++k) {
        if (!(n.waypoints[k].t > n.waypoints[k - 1].t)) {
          throw InputError("npc " + std::to_string(n.id) + ": waypoint times must increase");
        }
      }
    }
  }

  std::string id() const
  {
    return std::string(to_string(archetype)) + "-" + std::to_string(seed);
  }
};

struct LabeledRecording
{
  AlignedRecording recording;
  std::vector<std::size_t> critical_frames;  // sorted; only up to the accident frame when one exists
  std::optional<FaultKind> injected_fault;
  std::optional<CausalEventKind> expected_main_cause;
  bool collided{false};
};

/// Tunables of the synthetic AV stack.
struct ForgeConfig
{
  double perception_range{60.0};
  double prediction_step{0.2};
  double horizon{8.0};
  double plan_step{0.1};
  double a_min{-6.0};
  double a_max{1.5};
  double buffer_base{2.0};
  double buffer_per_speed{0.3};
  double stop_buffer{4.0};
  double crit_factor{3.0};
  double fault_near_range{60.0};
  double f2_rotation_deg{30.0};
  double f8_speed{15.0};
  double post_collision{1.0};
};

namespace forge
{

struct Perceived
{
  ObstacleObservation obs;
  PredictedTrajectory pred;
};

/// Constant-acceleration speed profile with a speed cap and floor.
struct Profile
{
  double v0{0.0};
  double a{0.0};
  double cap{0.0};
  double floor{0.0};

  double v(double t) const
  {
    return a >= 0.0 ? std::min(v0 + a * t, cap) : std::max(v0 + a * t, floor);
  }

  double s(double t) const
  {
    if (a == 0.0) {
      return v0 * t;
    }
    const double limit = a > 0.0 ? cap : floor;
    const double t_sat = (limit - v0) / a;
    if (t_sat <= 0.0) {
      return limit * t;
    }
    if (t <= t_sat) {
      return v0 * t + 0.5 * a * t * t;
    }
    return v0 * t_sat + 0.5 * a * t_sat * t_sat + limit * (t - t_sat);
  }
};

struct Constraint
{
  NpcId npc{0};
  std::vector<StCell> cells;
  double buffer{0.0};
};

inline bool feasible(const Profile & p, const std::vector<Constraint> & cs)
{
  for (const auto & c : cs) {
    for (const auto & cell : c.cells) {
      if (cell.s_hi < 0.0) {
        continue;  // behind the AV
      }
      if (p.s(cell.t) > cell.s_lo - c.buffer) {
        return false;
      }
    }
  }
  return true;
}

struct PlanResult
{
  PlanningMessage msg;
  Profile profile;
};

class Simulator
{
public:
  Simulator(const ScenarioSpec & spec, std::optional<FaultKind> fault, ForgeConfig cfg)
  : spec_(spec), fault_(fault), cfg_(cfg), route_(spec.av.route)
  {
    for (const auto & z : spec_.map.zones) {
      zone_entry_.push_back(path_interval_inside(route_, z.area));
    }
    for (const auto & p : spec_.map.stop_signs) {
      stop_station_.push_back(route_.project(p).s);
    }
  }

  LabeledRecording run()
  {
    LabeledRecording out;
    out.injected_fault = fault_;
    if (fault_) {
      out.expected_main_cause = expected_main_cause(*fault_);
    }
    AlignedRecording & rec = out.recording;
    rec.id = spec_.id() + (fault_ ? "-" + std::string(to_string(*fault_)).substr(0, 2) : "");
    rec.frame_duration = spec_.frame_duration;

    double s = spec_.av.start_s;
    double l = 0.0;
    double v = spec_.av.speed;
    const auto n_frames =
      static_cast<std::size_t>(std::floor(spec_.duration / spec_.frame_duration + 1e-9)) + 1;
    std::optional<double> stop_at;
    for (std::size_t k = 0; k < n_frames; ++k) {
      const double t = static_cast<double>(k) * spec_.frame_duration;
      if (stop_at && t > *stop_at + 1e-9) {
        break;
      }
      Frame f;
      f.index = k;
      f.t_start = t;
      f.localization = av_pose(s, l, v);
      f.ground_truth.av = {f.localization, spec_.av.length, spec_.av.width};
      for (const auto & n : spec_.npcs) {
        if (auto fp = n.footprint_at(t)) {
          f.ground_truth.npc_states[n.id] = *fp;
        }
      }
      const auto perceived = perceive(f, t);
      for (const auto & p : perceived) {
        f.perception.push_back(p.obs);
        f.prediction.push_back(p.pred);
      }
      f.map_context = map_context(s, f.localization.position());
      const auto plan = plan_frame(f, perceived, s, v);
      f.planning = plan.msg;

      if (!stop_at && detect_collision(f)) {
        stop_at = t + cfg_.post_collision;
        out.collided = true;
      }
      rec.frames.push_back(std::move(f));

      const double d = spec_.frame_duration;
      s += plan.profile.s(d);
      v = plan.profile.v(d);
      if (spec_.skid && t + d > spec_.skid->onset) {
        const double from = std::max(t, spec_.skid->onset);
        l += spec_.skid->drift_rate * (t + d - from);
      }
    }

    rec.accident = find_first_accident(rec);
    const std::size_t last = rec.accident ? rec.accident->frame : rec.frames.size() - 1;
    for (std::size_t i = 0; i <= last && i < rec.frames.size(); ++i) {
      if (is_critical(rec.frames[i])) {
        out.critical_frames.push_back(i);
      }
    }
    return out;
  }

private:
  Pose av_pose(double s, double l, double v) const
  {
    const Vec2 p = route_.to_cartesian({s, l});
    return {p.x, p.y, normalize_angle(route_.heading_at(s)), v};
  }

  bool is_critical(const Frame & f) const
  {
    const Vec2 av = f.localization.position();
    for (const auto & [id, fp] : f.ground_truth.npc_states) {
      if (distance(av, fp.center.position()) < cfg_.crit_factor * f.localization.speed) {
        return true;
      }
    }
    const auto mv = extract_map_vector(f);
    return mv.near_junction || mv.near_crosswalk || mv.near_stop_sign || f.map_context.on_junction ||
           f.map_context.on_crosswalk;
  }

  std::vector<Perceived> perceive(const Frame & f, double /*t*/) const
  {
    std::vector<Perceived> out;
    const Vec2 av = f.localization.position();
    const Vec2 av_dir = Vec2::unit(f.localization.heading);
    for (const auto & n : spec_.npcs) {
      auto it = f.ground_truth.npc_states.find(n.id);
      if (it == f.ground_truth.npc_states.end()) {
        continue;
      }
      const Footprint & fp = it->second;
      const Vec2 p = fp.center.position();
      const double d = distance(av, p);
      if (d > cfg_.perception_range) {
        continue;
      }
      Perceived pc;
      pc.obs = {n.id, fp, n.kind, n.kind == ObstacleKind::static_object};
      pc.pred.npc_id = n.id;

      const Vec2 rel_p = p - av;
      const Vec2 rel_v = fp.center.velocity() - f.localization.velocity();
      const bool approaching = d > 0.0 && -rel_p.dot(rel_v) / d > 0.0;
      if (fault_ == FaultKind::f1_ignore_all_priority) {
        pc.pred.priority = Priority::ignore;
      } else if (d < cfg_.crit_factor * f.localization.speed) {
        pc.pred.priority = Priority::caution;
      } else if (rel_p.dot(av_dir) < 0.0 && !approaching) {
        pc.pred.priority = Priority::ignore;
      } else {
        pc.pred.priority = Priority::normal;
      }

      // The wrong model bends the path away; footprints keep the observed heading.
      double course = fp.center.heading;
      if (fault_ == FaultKind::f2_wrong_traj_model) {
        course = normalize_angle(course + cfg_.f2_rotation_deg * M_PI / 180.0);
      }
      const Vec2 vel = Vec2::unit(course) * fp.center.speed;
      const auto steps = static_cast<int>(std::lround(cfg_.horizon / cfg_.prediction_step));
      for (int k = 0; k <= steps; ++k) {
        const double tk = k * cfg_.prediction_step;
        const Vec2 q = p + vel * tk;
        pc.pred.waypoints.push_back({tk, {q.x, q.y, fp.center.heading, fp.center.speed}});
      }
      out.push_back(std::move(pc));
    }
    return out;
  }

  MapContext map_context(double s, Vec2 av) const
  {
    MapContext m;
    m.zones = spec_.map.zones;
    m.on_junction = m.inside(ZoneKind::junction, av);
    m.on_crosswalk = m.inside(ZoneKind::crosswalk, av);
    auto nearest = [&](ZoneKind kind) -> std::optional<double> {
      std::optional<double> best;
      for (std::size_t i = 0; i < spec_.map.zones.size(); ++i) {
        if (spec_.map.zones[i].kind != kind || !zone_entry_[i]) {
          continue;
        }
        const auto [lo, hi] = *zone_entry_[i];
        if (s > hi) {
          continue;
        }
        const double d = std::max(0.0, lo - s);
        if (!best || d < *best) {
          best = d;
        }
      }
      return best;
    };
    m.dist_to_junction = nearest(ZoneKind::junction);
    m.dist_to_crosswalk = nearest(ZoneKind::crosswalk);
    for (double ss : stop_station_) {
      if (ss >= s && (!m.dist_to_stop_sign || ss - s < *m.dist_to_stop_sign)) {
        m.dist_to_stop_sign = ss - s;
      }
    }
    return m;
  }

  std::vector<StCell> cells_for(const Perceived & p, double s, bool freeze) const
  {
    StGraphConfig st;
    st.horizon = cfg_.horizon;
    st.time_step = cfg_.prediction_step;
    const auto & w = p.pred.waypoints;
    const Footprint dims = p.obs.footprint;
    auto at = [&](double t) -> std::optional<Footprint> {
      if (t > w.back().t + 1e-9) {
        return std::nullopt;
      }
      Footprint f = dims;
      f.center = freeze ? w.front().pose : interpolate_pose(w, t);
      return f;
    };
    return block_cells(route_, s, {spec_.av.length, spec_.av.width}, at, st);
  }

  PlanResult plan_frame(const Frame & f, const std::vector<Perceived> & perceived, double s, double v)
  {
    PlanResult out;
    PlanningMessage & msg = out.msg;
    const double buffer = cfg_.buffer_base + cfg_.buffer_per_speed * v;
    const Vec2 av = f.localization.position();
    const double route_heading = route_.heading_at(s);

    bool any_near = false;
    std::vector<Constraint> constraints;
    std::optional<std::pair<double, Decision>> main;  // nearest conflict station, decision
    std::map<NpcId, Decision> decisions;
    for (const auto & p : perceived) {
      if (p.pred.priority == Priority::ignore) {
        continue;
      }
      const double d = distance(av, p.obs.footprint.center.position());
      const bool near = d < cfg_.fault_near_range;
      any_near = any_near || near;
      auto cells = cells_for(p, s, false);
      std::erase_if(cells, [](const StCell & c) { return c.s_hi < 0.0; });
      if (cells.empty()) {
        decisions[p.obs.npc_id] = Decision::ignore;
        continue;
      }
      const Footprint & fp = p.obs.footprint;
      const bool aligned =
        std::abs(normalize_angle(fp.center.heading - route_heading)) < M_PI / 6.0 &&
        cells.front().t == 0.0;
      const bool stopped = p.obs.is_static || fp.center.speed < 0.5;
      Decision dec = stopped && aligned ? Decision::stop : aligned ? Decision::follow : Decision::yield;
      Constraint c{p.obs.npc_id, cells, dec == Decision::stop ? cfg_.stop_buffer : buffer};
      bool constrain = true;

      if (fault_ == FaultKind::f3_ignore_static && p.obs.is_static) {
        dec = Decision::ignore;
        constrain = false;
      } else if (fault_ == FaultKind::f4_follow_stopping && aligned && !p.obs.is_static &&
                 decelerating(p.obs.npc_id, f.t_start)) {
        // Treat the stopping leader as if it kept the AV's pace.
        dec = Decision::follow;
        for (auto & cell : c.cells) {
          const double shift = (v - fp.center.speed) * cell.t;
          cell.s_lo += shift;
          cell.s_hi += shift;
        }
      } else if (fault_ == FaultKind::f5_ignore_ahead && aligned &&
                 prev_decisions_.count(p.obs.npc_id) != 0 &&
                 prev_decisions_.at(p.obs.npc_id) != Decision::follow) {
        dec = Decision::ignore;
        constrain = false;
      } else if (fault_ == FaultKind::f5_ignore_ahead && aligned &&
                 prev_decisions_.count(p.obs.npc_id) == 0) {
        dec = Decision::ignore;
        constrain = false;
      } else if (fault_ == FaultKind::f6_yield_fast && aligned && fp.center.speed > v) {
        dec = Decision::yield;
        c.cells = cells_for(p, s, true);
        std::erase_if(c.cells, [](const StCell & cell) { return cell.s_hi < 0.0; });
      } else if (fault_ == FaultKind::f7_overtake_all && near) {
        dec = Decision::overtake;
        constrain = false;
      }
      decisions[p.obs.npc_id] = dec;
      if (constrain) {
        constraints.push_back(std::move(c));
      }
      if (dec != Decision::ignore) {
        const double conflict = cells.front().s_lo;
        if (!main || conflict < main->first) {
          main = {conflict, dec};
        }
      }
    }

    double target = spec_.map.speed_limit;
    if (fault_ == FaultKind::f8_high_speed_near && any_near) {
      target = cfg_.f8_speed;
      constraints.clear();
    }

    const double a_des = std::clamp(target - v, cfg_.a_min, cfg_.a_max);
    Profile prof{v, a_des, std::max(v, target), a_des < 0.0 ? std::min(v, target) : 0.0};
    if (!feasible(prof, constraints)) {
      prof.floor = 0.0;
      prof.a = cfg_.a_min;
      if (feasible(prof, constraints)) {
        double lo = cfg_.a_min;
        double hi = a_des;
        for (int it = 0; it < 40; ++it) {
          const double mid = 0.5 * (lo + hi);
          prof.a = mid;
          (feasible(prof, constraints) ? lo : hi) = mid;
        }
        prof.a = lo;
      }
    }
    out.profile = prof;

    const auto steps = static_cast<int>(std::lround(cfg_.horizon / cfg_.plan_step));
    for (int k = 0; k <= steps; ++k) {
      const double tk = k * cfg_.plan_step;
      const double sk = s + prof.s(tk);
      const Vec2 q = route_.point_at(sk);
      msg.trajectory.push_back({tk, {q.x, q.y, normalize_angle(route_.heading_at(sk)), prof.v(tk)}, prof.v(tk)});
    }
    msg.decisions = decisions;
    msg.main_decision = main ? main->second : Decision::ignore;
    msg.odd = f.map_context.on_junction ? "intersection" : "lane_follow";
    msg.rss_safe = std::none_of(perceived.begin(), perceived.end(), [&](const Perceived & p) {
      return distance(av, p.obs.footprint.center.position()) < cfg_.crit_factor * v;
    });
    msg.speed_limit_lo = 0.0;
    msg.speed_limit_hi = spec_.map.speed_limit;
    prev_decisions_ = decisions;
    return out;
  }

  bool decelerating(NpcId id, double t) const
  {
    for (const auto & n : spec_.npcs) {
      if (n.id != id) {
        continue;
      }
      auto now = n.footprint_at(t);
      auto before = n.footprint_at(t - 0.5);
      return now && before && now->center.speed < before->center.speed - 0.05;
    }
    return false;
  }

  const ScenarioSpec & spec_;
  std::optional<FaultKind> fault_;
  ForgeConfig cfg_;
  ReferencePath route_;
  std::vector<std::optional<std::pair<double, double>>> zone_entry_;
  std::vector<double> stop_station_;
  std::map<NpcId, Decision> prev_decisions_;
};

inline bool has_static(const ScenarioSpec & s)
{
  return std::any_of(s.npcs.begin(), s.npcs.end(), [](const NpcScript & n) {
    return n.kind == ObstacleKind::static_object;
  });
}

/// Some NPC starts behind the AV and travels the same way.
inline bool has_follower(const ScenarioSpec & s)
{
  const ReferencePath route(s.av.route);
  for (const auto & n : s.npcs) {
    if (n.waypoints.size() < 2 || n.kind == ObstacleKind::static_object) {
      continue;
    }
    const auto a = route.project({n.waypoints.front().x, n.waypoints.front().y});
    const auto b = route.project({n.waypoints[1].x, n.waypoints[1].y});
    if (a.s < s.av.start_s && b.s > a.s && std::abs(a.l) < 2.0) {
      return true;
    }
  }
  return false;
}

}  // namespace forge

inline LabeledRecording generate(const ScenarioSpec & spec, const ForgeConfig & cfg = {})
{
  spec.validate();
  return forge::Simulator(spec, std::nullopt, cfg).run();
}

inline void check_fault_applicable(const ScenarioSpec & spec, FaultKind fault)
{
  auto fail = [&](const char * why) {
    throw InputError(std::string(to_string(fault)) + " does not apply to " +
                     std::string(to_string(spec.archetype)) + " scenario: " + why);
  };
  if (spec.npcs.empty()) {
    fail("no NPC");
  }
  switch (fault) {
    case FaultKind::f3_ignore_static:
      if (!forge::has_static(spec)) fail("needs a static NPC");
      break;
    case FaultKind::f4_follow_stopping:
      if (spec.archetype != Archetype::tailgating) fail("needs a stopping leader");
      break;
    case FaultKind::f5_ignore_ahead:
      if (spec.archetype == Archetype::intersection) fail("needs an NPC ahead in the lane");
      break;
    case FaultKind::f6_yield_fast:
      if (!forge::has_follower(spec)) fail("needs an NPC following the AV");
      break;
    case FaultKind::f7_overtake_all:
    case FaultKind::f8_high_speed_near:
      if (spec.archetype == Archetype::tailgating) fail("needs a crossing or merging NPC");
      break;
    default:
      break;
  }
}

inline LabeledRecording inject_fault(const ScenarioSpec & spec, FaultKind fault, const ForgeConfig & cfg = {})
{
  spec.validate();
  check_fault_applicable(spec, fault);
  return forge::Simulator(spec, fault, cfg).run();
}

namespace forge
{

/// Portable uniform draws from a 64-bit Mersenne Twister.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi)
  {
    const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

private:
  std::mt19937_64 gen_;
};

inline std::vector<ScriptPoint> straight(double t0, Vec2 p0, Vec2 dir, double speed, double t1)
{
  const Vec2 p1 = p0 + dir * (speed * (t1 - t0));
  return {{t0, p0.x, p0.y}, {t1, p1.x, p1.y}};
}

}  // namespace forge

/// Seeded scenario of the given archetype. Each starts with an empty stretch
/// of road before the interaction.
inline ScenarioSpec sample_scenario(Archetype archetype, std::uint64_t seed)
{
  forge::Rng rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(archetype) + 1);
  ScenarioSpec s;
  s.seed = seed;
  s.archetype = archetype;
  switch (archetype) {
    case Archetype::intersection: {
      const double v = rng.uniform(10.0, 12.0);
      const double t_meet = rng.uniform(11.0, 15.0);
      const double x_j = v * t_meet;
      const double v_n = rng.uniform(6.0, 9.0);
      const double t_npc = t_meet + rng.uniform(-0.65, -0.45);
      s.map.speed_limit = v;
      s.av.speed = v;
      s.av.route = {{0.0, 0.0}, {x_j + 300.0, 0.0}};
      s.map.zones.push_back({ZoneKind::junction, OrientedBox{{x_j, 0.0}, 0.0, 30.0, 30.0}});
      NpcScript n;
      n.id = 2;
      const double t0 = t_npc - 6.0;
      n.waypoints = forge::straight(t0, {x_j, -v_n * 6.0}, {0.0, 1.0}, v_n, t_npc + 10.0);
      s.npcs.push_back(n);
      s.duration = t_meet + 4.0;
      break;
    }
    case Archetype::merging: {
      const double v = rng.uniform(11.0, 13.0);
      const double t_merge = rng.uniform(11.0, 15.0);
      const double v_n = v - rng.uniform(2.0, 4.0);
      const double lag = rng.uniform(4.0, 8.0);  // AV centre behind the merge point
      const double x_m = v * t_merge + lag;
      const double theta = 12.0 * M_PI / 180.0;
      s.map.speed_limit = v;
      s.av.speed = v;
      s.av.route = {{0.0, 0.0}, {x_m + 300.0, 0.0}};
      NpcScript n;
      n.id = 3;
      const double ramp_time = 6.0;
      const Vec2 dir = Vec2::unit(theta);
      const Vec2 start = Vec2{x_m, 0.0} - dir * (v_n * ramp_time);
      n.waypoints = {{t_merge - ramp_time, start.x, start.y}, {t_merge, x_m, 0.0},
                     {t_merge + 20.0, x_m + 20.0 * v_n, 0.0}};
      s.npcs.push_back(n);
      s.duration = t_merge + 5.0;
      break;
    }
    case Archetype::tailgating: {
      const double v = rng.uniform(12.0, 14.0);
      const double v_n = v - rng.uniform(6.5, 7.5);
      const double t_cut = rng.uniform(10.0, 14.0);
      const double gap = rng.uniform(14.0, 16.5);  // centre gap when the cut-in starts
      const double v_lat = rng.uniform(0.8, 1.0);
      const double brake = rng.uniform(2.0, 3.0);
      const double lane = 3.5;
      s.map.speed_limit = v;
      s.av.speed = v;
      const double x_c = v * t_cut + gap;  // NPC x when the cut-in starts
      s.av.route = {{0.0, 0.0}, {x_c + 400.0, 0.0}};
      NpcScript n;
      n.id = 4;
      const double x0 = x_c - v_n * t_cut;
      n.waypoints.push_back({0.0, x0, lane});
      n.waypoints.push_back({t_cut, x_c, lane});
      const double t_in = t_cut + lane / v_lat;
      double x = x_c + v_n * (t_in - t_cut);
      n.waypoints.push_back({t_in, x, 0.0});
      // Brake to a stop once in lane.
      double speed = v_n;
      double t = t_in;
      while (speed > 0.0) {
        const double dt = 0.2;
        const double nv = std::max(0.0, speed - brake * dt);
        x += 0.5 * (speed + nv) * dt;
        t += dt;
        speed = nv;
        n.waypoints.push_back({t, x, 0.0});
      }
      n.waypoints.push_back({t + 30.0, x, 0.0});
      s.npcs.push_back(n);
      s.duration = t_in + 8.0;
      break;
    }
  }
  return s;
}

/// Fault-injected recordings over consecutive seeds, keeping only those that
/// end in a collision, until `count` are collected.
inline std::vector<LabeledRecording> fault_corpus(
  Archetype archetype, FaultKind fault, std::size_t count, std::uint64_t first_seed = 0,
  const ForgeConfig & cfg = {})
{
  std::vector<LabeledRecording> out;
  const std::uint64_t max_seed = first_seed + 10 * count + 10;
  for (std::uint64_t seed = first_seed; out.size() < count && seed < max_seed; ++seed) {
    auto r = inject_fault(sample_scenario(archetype, seed), fault, cfg);
    if (r.collided) {
      out.push_back(std::move(r));
    }
  }
  if (out.size() < count) {
    throw Error("could not collect enough colliding scenarios");
  }
  return out;
}

/// Long empty prefix followed by a short cut-in the AV never reacts to.
inline ScenarioSpec motivating_example_spec()
{
  ScenarioSpec s;
  s.seed = 0;
  s.archetype = Archetype::merging;
  const double v = 12.0;
  s.map.speed_limit = v;
  s.av.speed = v;
  s.av.route = {{0.0, 0.0}, {600.0, 0.0}};
  const double t_spawn = 13.0;
  const double v_n = 6.0;
  const double gap = 27.0;
  NpcScript n;
  n.id = 2;
  const double x0 = v * t_spawn + gap;
  const double lane = 3.5;
  n.waypoints = {{t_spawn, x0, lane},
                 {t_spawn + 1.0, x0 + v_n, lane},
                 {t_spawn + 3.0, x0 + 3.0 * v_n, 0.0},
                 {t_spawn + 20.0, x0 + 20.0 * v_n, 0.0}};
  s.npcs.push_back(n);
  s.duration = t_spawn + 8.0;
  return s;
}

/// Empty road, AV drifting sideways from `onset` on.
inline ScenarioSpec skid_fixture_spec(std::uint64_t seed, double drift_rate)
{
  forge::Rng rng(seed + 77);
  ScenarioSpec s;
  s.seed = seed;
  s.archetype = Archetype::tailgating;
  const double v = rng.uniform(8.0, 14.0);
  s.map.speed_limit = v;
  s.av.speed = v;
  s.av.route = {{0.0, 0.0}, {500.0, 0.0}};
  s.duration = 8.0;
  if (drift_rate > 0.0) {
    s.skid = SkidModel{rng.uniform(2.0, 4.0), drift_rate};
  }
  return s;
}

// ---- JSON ----------------------------------------------------------------

inline nlohmann::json to_json(const ScenarioSpec & s)
{
  using nlohmann::json;
  json j;
  j["seed"] = s.seed;
  j["archetype"] = to_string(s.archetype);
  j["duration"] = s.duration;
  j["frame_duration"] = s.frame_duration;
  json route = json::array();
  for (const auto & p : s.av.route) {
    route.push_back({p.x, p.y});
  }
  j["av"] = {{"route", route}, {"start_s", s.av.start_s}, {"speed", s.av.speed},
             {"length", s.av.length}, {"width", s.av.width}};
  json zones = json::array();
  for (const auto & z : s.map.zones) {
    zones.push_back({{"kind", kZoneKindNames.to_string(z.kind)}, {"area", to_json(z.area)}});
  }
  json signs = json::array();
  for (const auto & p : s.map.stop_signs) {
    signs.push_back({p.x, p.y});
  }
  j["map"] = {{"zones", zones}, {"stop_signs", signs}, {"speed_limit", s.map.speed_limit}};
  json npcs = json::array();
  for (const auto & n : s.npcs) {
    json w = json::array();
    for (const auto & p : n.waypoints) {
      w.push_back({p.t, p.x, p.y});
    }
    npcs.push_back({{"id", n.id}, {"kind", to_string(n.kind)}, {"length", n.length},
                    {"width", n.width}, {"heading", n.heading}, {"waypoints", w}});
  }
  j["npcs"] = npcs;
  if (s.skid) {
    j["skid"] = {{"onset", s.skid->onset}, {"drift_rate", s.skid->drift_rate}};
  } else {
    j["skid"] = nullptr;
  }
  return j;
}

inline ScenarioSpec scenario_from_json(const nlohmann::json & j)
{
  try {
    ScenarioSpec s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.archetype = parse_archetype(j.at("archetype").get<std::string>());
    s.duration = j.at("duration").get<double>();
    s.frame_duration = j.value("frame_duration", kDefaultFrameDuration);
    const auto & av = j.at("av");
    for (const auto & p : av.at("route")) {
      s.av.route.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    s.av.start_s = av.value("start_s", 0.0);
    s.av.speed = av.at("speed").get<double>();
    s.av.length = av.value("length", 4.9);
    s.av.width = av.value("width", 2.1);
    const auto & map = j.at("map");
    s.map.speed_limit = map.at("speed_limit").get<double>();
    for (const auto & z : map.value("zones", nlohmann::json::array())) {
      const auto kind = kZoneKindNames.parse(z.at("kind").get<std::string>());
      if (!kind) {
        throw InputError("unknown zone kind");
      }
      s.map.zones.push_back({*kind, box_from_json(z.at("area"))});
    }
    for (const auto & p : map.value("stop_signs", nlohmann::json::array())) {
      s.map.stop_signs.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    for (const auto & n : j.at("npcs")) {
      NpcScript script;
      script.id = n.at("id").get<int>();
      const auto kind = kObstacleKindNames.parse(n.at("kind").get<std::string>());
      if (!kind) {
        throw InputError("unknown obstacle kind");
      }
      script.kind = *kind;
      script.length = n.value("length", 4.5);
      script.width = n.value("width", 2.0);
      script.heading = n.value("heading", 0.0);
      for (const auto & w : n.at("waypoints")) {
        script.waypoints.push_back({w.at(0).get<double>(), w.at(1).get<double>(), w.at(2).get<double>()});
      }
      s.npcs.push_back(std::move(script));
    }
    if (j.contains("skid") && !j.at("skid").is_null()) {
      s.skid = SkidModel{j.at("skid").at("onset").get<double>(), j.at("skid").at("drift_rate").get<double>()};
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception & e) {
    throw InputError(std::string("scenario spec: ") + e.what());
  }
}

inline nlohmann::json label_json(const LabeledRecording & r)
{
  nlohmann::json j;
  j["critical_frames"] = r.critical_frames;
  j["injected_fault"] = r.injected_fault ? nlohmann::json(to_string(*r.injected_fault)) : nlohmann::json(nullptr);
  j["expected_main_cause"] =
    r.expected_main_cause ? nlohmann::json(to_string(*r.expected_main_cause)) : nlohmann::json(nullptr);
  return j;
}

struct Labels
{
  std::vector<std::size_t> critical_frames;
  std::optional<FaultKind> injected_fault;
  std::optional<CausalEventKind> expected_main_cause;
};

inline Labels labels_from_json(const nlohmann::json & j)
{
  try {
    Labels l;
    l.critical_frames = j.at("critical_frames").get<std::vector<std::size_t>>();
    if (!j.at("injected_fault").is_null()) {
      l.injected_fault = parse_fault(j.at("injected_fault").get<std::string>());
    }
    if (!j.at("expected_main_cause").is_null()) {
      const auto k = kCausalEventKindNames.parse(j.at("expected_main_cause").get<std::string>());
      if (!k) {
        throw InputError("unknown causal event kind in labels");
      }
      l.expected_main_cause = *k;
    }
    return l;
  } catch (const nlohmann::json::exception & e) {
    throw InputError(std::string("label file: ") + e.what());
  }
}

}  // namespace acav
