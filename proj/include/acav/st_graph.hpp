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

// Station-Time graph of one frame: the planned speed curve s(t) along the
// frame's own planned path, and obstacle blocks (t, [s_lo, s_hi]) built from
// either the AV's predictions or the recording's ground-truth future.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "acav/frenet.hpp"
#include "acav/recording.hpp"

namespace acav
{

struct StGraphConfig
{
  double horizon{8.0};
  double time_step{0.1};
  double lateral_margin{0.3};
  double intersect_tolerance{0.1};  // epsilon on station when testing curve/block contact
  double path_tail{30.0};           // straight extension past the last planned point
};

struct StSample
{
  double t{0.0};
  double s{0.0};
  double v{0.0};
};

class StCurve
{
public:
  StCurve() = default;
  explicit StCurve(std::vector<StSample> samples) : samples_(std::move(samples)) {}

  const std::vector<StSample> & samples() const { return samples_; }
  bool empty() const { return samples_.empty(); }
  double t_begin() const { return samples_.front().t; }
  double t_end() const { return samples_.back().t; }

  /// Linear interpolation of s; nullopt outside the sampled time range.
  std::optional<double> s_at(double t) const
  {
    if (samples_.empty() || t < t_begin() || t > t_end()) {
      return std::nullopt;
    }
    auto it = std::upper_bound(
      samples_.begin(), samples_.end(), t, [](double v, const StSample & p) { return v < p.t; });
    if (it == samples_.end()) {
      return samples_.back().s;
    }
    const auto & b = *it;
    const auto & a = *(it - 1);
    return a.s + (t - a.t) / (b.t - a.t) * (b.s - a.s);
  }

  /// Largest |ds/dt - v| over consecutive samples.
  double max_gradient_mismatch() const
  {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < samples_.size(); ++i) {
      const auto & a = samples_[i];
      const auto & b = samples_[i + 1];
      worst = std::max(worst, std::abs((b.s - a.s) / (b.t - a.t) - a.v));
    }
    return worst;
  }

private:
  std::vector<StSample> samples_;
};

enum class BlockSource { perceived, ground_truth };
inline constexpr EnumNames<BlockSource, 2> kBlockSourceNames{{"perceived", "ground_truth"}};

struct StCell
{
  double t{0.0};
  double s_lo{0.0};
  double s_hi{0.0};
};

struct StBlock
{
  NpcId npc_id{0};
  BlockSource source{BlockSource::perceived};
  std::vector<StCell> cells;
};

struct StGraph
{
  StCurve curve;
  std::vector<StBlock> perceived;
  std::vector<StBlock> truth;
  double horizon{8.0};

  const StBlock * find(BlockSource src, NpcId id) const
  {
    const auto & list = src == BlockSource::perceived ? perceived : truth;
    auto it = std::find_if(list.begin(), list.end(), [id](const StBlock & b) { return b.npc_id == id; });
    return it == list.end() ? nullptr : &*it;
  }
};

/// Frame's planned path extended straight past its last point, so that
/// obstacles beyond a stopping plan still land on the path.
inline ReferencePath planned_reference_path(const Frame & frame, const StGraphConfig & cfg = {})
{
  const auto & traj = frame.planning.trajectory;
  if (traj.size() < 2) {
    throw InputError(
      "frame " + std::to_string(frame.index) + ": planned trajectory needs at least two points");
  }
  std::vector<Vec2> pts;
  pts.reserve(traj.size() + 1);
  for (const auto & tp : traj) {
    if (pts.empty() || distance(pts.back(), tp.pose.position()) > 1e-9) {
      pts.push_back(tp.pose.position());
    }
  }
  double tail_heading = traj.back().pose.heading;
  if (pts.size() >= 2) {
    const Vec2 d = pts.back() - pts[pts.size() - 2];
    tail_heading = std::atan2(d.y, d.x);
  }
  pts.push_back(pts.back() + Vec2::unit(tail_heading) * cfg.path_tail);
  return ReferencePath(pts);
}

inline double av_station(const ReferencePath & path, const Frame & frame)
{
  return path.project(frame.localization.position()).s;
}

inline StCurve build_curve(const Frame & frame, const ReferencePath & path)
{
  const auto & traj = frame.planning.trajectory;
  if (traj.size() < 2) {
    throw InputError(
      "frame " + std::to_string(frame.index) + ": planned trajectory needs at least two points");
  }
  const double s0 = av_station(path, frame);
  std::vector<StSample> out;
  out.reserve(traj.size());
  double s_max = -std::numeric_limits<double>::infinity();
  for (const auto & tp : traj) {
    s_max = std::max(s_max, path.project(tp.pose.position()).s - s0);
    out.push_back({tp.t, s_max, std::max(0.0, tp.planned_speed)});
  }
  return StCurve(std::move(out));
}

inline StCurve build_curve(const Frame & frame, const StGraphConfig & cfg = {})
{
  return build_curve(frame, planned_reference_path(frame, cfg));
}

/// Station interval of path centre-line points inside `box`, via segment
/// clipping in the box frame. nullopt when the path misses the box.
inline std::optional<std::pair<double, double>> path_interval_inside(
  const ReferencePath & path, const OrientedBox & box)
{
  const auto & pts = path.points();
  const auto & cs = path.cumulative_s();
  const Vec2 ax = box.axis();
  const Vec2 nx = box.normal();
  const double hl = 0.5 * box.length;
  const double hw = 0.5 * box.width;
  const double reach = box.circumradius();
  std::optional<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 a = pts[i];
    const Vec2 b = pts[i + 1];
    const double u_near = closest_param_on_segment(a, b, box.center);
    if (distance(a + (b - a) * u_near, box.center) > reach) {
      continue;
    }
    // Liang-Barsky clip of a + u (b - a), u in [0, 1], against |x| <= hl, |y| <= hw.
    const Vec2 pa{(a - box.center).dot(ax), (a - box.center).dot(nx)};
    const Vec2 d{(b - a).dot(ax), (b - a).dot(nx)};
    double u0 = 0.0;
    double u1 = 1.0;
    bool hit = true;
    auto clip = [&](double p, double q) {
      // Constraint p * u <= q.
      if (p == 0.0) {
        if (q < 0.0) hit = false;
        return;
      }
      const double r = q / p;
      if (p < 0.0) {
        u0 = std::max(u0, r);
      } else {
        u1 = std::min(u1, r);
      }
    };
    clip(-d.x, pa.x + hl);
    clip(d.x, hl - pa.x);
    clip(-d.y, pa.y + hw);
    clip(d.y, hw - pa.y);
    if (!hit || u0 > u1) {
      continue;
    }
    const double seg = cs[i + 1] - cs[i];
    const double s_a = cs[i] + u0 * seg;
    const double s_b = cs[i] + u1 * seg;
    if (!out) {
      out = {s_a, s_b};
    } else {
      out->first = std::min(out->first, s_a);
      out->second = std::max(out->second, s_b);
    }
  }
  return out;
}

/// Dimensions of the vehicle the ST graph belongs to.
struct AvShape
{
  double length{4.9};
  double width{2.1};
};

/// Cells for an obstacle whose footprint at relative time t is given by
/// `footprint_at` (nullopt once no data exists). The footprint is inflated by
/// the AV half width plus margin; the path interval it covers is widened by the
/// AV half length so the cell bounds refer to the AV reference point.
inline std::vector<StCell> block_cells(
  const ReferencePath & path, double s_origin, const AvShape & av,
  const std::function<std::optional<Footprint>(double)> & footprint_at, const StGraphConfig & cfg)
{
  std::vector<StCell> cells;
  const double inflate = 0.5 * av.width + cfg.lateral_margin;
  const auto steps = static_cast<int>(std::floor(cfg.horizon / cfg.time_step + 1e-9));
  for (int k = 0; k <= steps; ++k) {
    const double t = k * cfg.time_step;
    auto fp = footprint_at(t);
    if (!fp) {
      break;
    }
    auto span = path_interval_inside(path, fp->box().inflated(inflate));
    if (!span) {
      continue;
    }
    cells.push_back(
      {t, span->first - 0.5 * av.length - s_origin, span->second + 0.5 * av.length - s_origin});
  }
  return cells;
}

inline AvShape av_shape(const Frame & frame)
{
  return {frame.ground_truth.av.length, frame.ground_truth.av.width};
}

inline std::vector<StBlock> build_blocks_perceived(
  const Frame & frame, const ReferencePath & path, const StGraphConfig & cfg = {})
{
  std::vector<StBlock> out;
  const double s0 = av_station(path, frame);
  const AvShape av = av_shape(frame);
  for (const auto & pred : frame.prediction) {
    if (pred.priority == Priority::ignore || pred.waypoints.empty()) {
      continue;
    }
    Footprint dims;
    if (const auto * obs = frame.find_obstacle(pred.npc_id)) {
      dims = obs->footprint;
    }
    const auto & w = pred.waypoints;
    auto at = [&](double t) -> std::optional<Footprint> {
      if (t < w.front().t - 1e-9 || t > w.back().t + 1e-9) {
        return std::nullopt;
      }
      Footprint f = dims;
      f.center = interpolate_pose(w, t);
      return f;
    };
    StBlock b{pred.npc_id, BlockSource::perceived, block_cells(path, s0, av, at, cfg)};
    if (!b.cells.empty()) {
      out.push_back(std::move(b));
    }
  }
  return out;
}

/// Ground-truth footprint of `npc` at t seconds after frame `i`, linearly
/// interpolated between frames. nullopt past the recording end or when the
/// NPC is absent from the bracketing frames.
inline std::optional<Footprint> ground_truth_npc_at(
  const AlignedRecording & rec, std::size_t i, NpcId npc, double t)
{
  const auto & fr = rec.frames;
  const double when = fr[i].t_start + t;
  constexpr double eps = 1e-9;
  std::size_t j = i;
  while (j + 1 < fr.size() && fr[j + 1].t_start <= when + eps) {
    ++j;
  }
  auto here = fr[j].ground_truth.npc_states.find(npc);
  if (here == fr[j].ground_truth.npc_states.end()) {
    return std::nullopt;
  }
  if (when <= fr[j].t_start + eps) {
    return here->second;
  }
  if (j + 1 >= fr.size()) {
    return std::nullopt;
  }
  auto there = fr[j + 1].ground_truth.npc_states.find(npc);
  if (there == fr[j + 1].ground_truth.npc_states.end()) {
    return std::nullopt;
  }
  const double r = (when - fr[j].t_start) / (fr[j + 1].t_start - fr[j].t_start);
  Footprint f = here->second;
  const Pose & a = here->second.center;
  const Pose & b = there->second.center;
  f.center.x = a.x + r * (b.x - a.x);
  f.center.y = a.y + r * (b.y - a.y);
  f.center.heading = normalize_angle(a.heading + r * normalize_angle(b.heading - a.heading));
  f.center.speed = a.speed + r * (b.speed - a.speed);
  return f;
}

/// Ground-truth AV pose t seconds after frame `i`; same interpolation rule.
inline std::optional<Pose> ground_truth_av_at(const AlignedRecording & rec, std::size_t i, double t)
{
  const auto & fr = rec.frames;
  const double when = fr[i].t_start + t;
  constexpr double eps = 1e-9;
  std::size_t j = i;
  while (j + 1 < fr.size() && fr[j + 1].t_start <= when + eps) {
    ++j;
  }
  const Pose & a = fr[j].ground_truth.av.center;
  if (when <= fr[j].t_start + eps) {
    return a;
  }
  if (j + 1 >= fr.size()) {
    return std::nullopt;
  }
  const Pose & b = fr[j + 1].ground_truth.av.center;
  const double r = (when - fr[j].t_start) / (fr[j + 1].t_start - fr[j].t_start);
  Pose p;
  p.x = a.x + r * (b.x - a.x);
  p.y = a.y + r * (b.y - a.y);
  p.heading = normalize_angle(a.heading + r * normalize_angle(b.heading - a.heading));
  p.speed = a.speed + r * (b.speed - a.speed);
  return p;
}

inline std::vector<StBlock> build_blocks_ground_truth(
  const AlignedRecording & rec, std::size_t frame_index, const ReferencePath & path,
  const StGraphConfig & cfg = {})
{
  const Frame & frame = rec.frames.at(frame_index);
  const double s0 = av_station(path, frame);
  const AvShape av = av_shape(frame);
  std::vector<StBlock> out;
  for (const auto & [id, fp] : frame.ground_truth.npc_states) {
    const NpcId npc = id;
    auto at = [&](double t) { return ground_truth_npc_at(rec, frame_index, npc, t); };
    StBlock b{npc, BlockSource::ground_truth, block_cells(path, s0, av, at, cfg)};
    if (!b.cells.empty()) {
      out.push_back(std::move(b));
    }
  }
  return out;
}

inline StGraph build_st_graph(
  const AlignedRecording & rec, std::size_t frame_index, const StGraphConfig & cfg = {})
{
  const Frame & frame = rec.frames.at(frame_index);
  const ReferencePath path = planned_reference_path(frame, cfg);
  StGraph g;
  g.curve = build_curve(frame, path);
  g.perceived = build_blocks_perceived(frame, path, cfg);
  g.truth = build_blocks_ground_truth(rec, frame_index, path, cfg);
  g.horizon = cfg.horizon;
  return g;
}

namespace detail
{

/// Time interval over which each cell is the time-nearest one. Interior
/// boundaries sit halfway between neighbours but never more than half the
/// nominal cell spacing away; the block does not extend past its first and
/// last cell times.
inline std::vector<std::pair<double, double>> cell_coverage(const std::vector<StCell> & cells)
{
  std::vector<std::pair<double, double>> cov(cells.size());
  double spacing = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < cells.size(); ++k) {
    spacing = std::min(spacing, cells[k].t - cells[k - 1].t);
  }
  const double half = std::isfinite(spacing) ? 0.5 * spacing : 0.0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const double t = cells[k].t;
    const double lo = k == 0 ? t : std::max(t - half, 0.5 * (cells[k - 1].t + t));
    const double hi = k + 1 == cells.size() ? t : std::min(t + half, 0.5 * (t + cells[k + 1].t));
    cov[k] = {lo, hi};
  }
  return cov;
}

}  // namespace detail

/// Earliest time at which the curve enters the station band of the block's
/// time-nearest cell, widened by the tolerance. nullopt when never.
inline std::optional<double> curve_block_intersect(
  const StCurve & curve, const StBlock & block, double tol = 0.1)
{
  if (curve.empty() || block.cells.empty()) {
    return std::nullopt;
  }
  const auto cov = detail::cell_coverage(block.cells);
  const auto & smp = curve.samples();
  std::optional<double> best;
  for (std::size_t k = 0; k < block.cells.size(); ++k) {
    const double lo_s = block.cells[k].s_lo - tol;
    const double hi_s = block.cells[k].s_hi + tol;
    const double a = std::max(cov[k].first, curve.t_begin());
    const double b = std::min(cov[k].second, curve.t_end());
    if (a > b || (best && a >= *best)) {
      continue;
    }
    for (std::size_t i = 0; i + 1 < smp.size(); ++i) {
      const double ta = std::max(a, smp[i].t);
      const double tb = std::min(b, smp[i + 1].t);
      if (ta > tb) {
        continue;
      }
      const double slope = (smp[i + 1].s - smp[i].s) / (smp[i + 1].t - smp[i].t);
      const double sa = smp[i].s + slope * (ta - smp[i].t);
      const double sb = smp[i].s + slope * (tb - smp[i].t);
      std::optional<double> hit;
      if (sa >= lo_s && sa <= hi_s) {
        hit = ta;
      } else if (sa < lo_s && sb >= lo_s) {
        hit = ta + (lo_s - sa) / slope;
      } else if (sa > hi_s && sb <= hi_s) {
        hit = ta + (hi_s - sa) / slope;
      }
      if (hit) {
        if (!best || *hit < *best) {
          best = hit;
        }
        break;
      }
    }
  }
  return best;
}

enum class DecisionReading { yield, overtake, mixed, clear };
inline constexpr EnumNames<DecisionReading, 4> kDecisionReadingNames{
  {"yield", "overtake", "mixed", "clear"}};

/// Block above the curve reads as yield, below as overtake.
inline DecisionReading decision_reading(const StCurve & curve, const StBlock & block, double tol = 0.1)
{
  bool any = false;
  bool all_above = true;
  bool all_below = true;
  for (const auto & c : block.cells) {
    auto s = curve.s_at(c.t);
    if (!s) {
      continue;
    }
    any = true;
    all_above = all_above && c.s_lo > *s;
    all_below = all_below && c.s_hi < *s;
  }
  if (!any) {
    return DecisionReading::clear;
  }
  if (curve_block_intersect(curve, block, tol)) {
    return DecisionReading::mixed;
  }
  if (all_above) {
    return DecisionReading::yield;
  }
  if (all_below) {
    return DecisionReading::overtake;
  }
  return DecisionReading::mixed;
}

/// Average displacement error between a prediction and the NPC's recorded
/// future, over the waypoints that fall inside the recording.
inline double prediction_error(
  const PredictedTrajectory & pred, const AlignedRecording & rec, std::size_t frame_index)
{
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto & w : pred.waypoints) {
    if (w.t < 0.0) {
      continue;
    }
    auto truth = ground_truth_npc_at(rec, frame_index, pred.npc_id, w.t);
    if (!truth) {
      continue;
    }
    sum += distance(truth->center.position(), w.pose.position());
    ++n;
  }
  if (n == 0) {
    throw InputError(
      "npc " + std::to_string(pred.npc_id) + ": no ground truth overlaps the prediction");
  }
  return sum / static_cast<double>(n);
}

}  // namespace acav
