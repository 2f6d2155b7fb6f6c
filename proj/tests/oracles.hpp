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

// Independent reference implementations and fixture generators for tests.

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "acav/acav.hpp"

namespace oracle
{

using namespace acav;

/// Weighted vote written out term by term.
inline bool eq1_vote(const VoteTuple & v, const VotingWeights & w)
{
  double lhs = 0.0;
  if (v.v_map) {
    lhs += w.w_map;
  }
  if (v.v_perc) {
    lhs += w.w_perc;
  }
  if (v.v_pln) {
    lhs += w.w_pln;
  }
  return lhs >= (w.w_map + w.w_perc + w.w_pln) / 2.0;
}

inline FrameVectors random_frame(std::mt19937_64 & rng)
{
  auto coin = [&](int one_in) { return rng() % one_in == 0; };
  auto ids = [&]() {
    std::vector<NpcId> out;
    if (coin(3)) {
      out.push_back(1 + static_cast<NpcId>(rng() % 3));
    }
    return out;
  };
  FrameVectors v;
  v.map.near_junction = coin(4);
  v.map.near_crosswalk = coin(6);
  v.map.near_stop_sign = coin(8);
  v.map.traffic_signal = static_cast<TrafficSignal>(rng() % 3);
  v.perc.approaching = ids();
  v.perc.near = ids();
  v.perc.caution_predicted = coin(3) ? ids() : std::vector<NpcId>{};
  v.perc.ignore_predicted = coin(3) ? ids() : std::vector<NpcId>{};
  v.pln.main_decision = static_cast<Decision>(rng() % 4);
  v.pln.odd = coin(2) ? "lane_follow" : "intersection";
  v.pln.motion = static_cast<Motion>(rng() % 4);
  v.pln.rss_safe = !coin(3);
  return v;
}

/// Runs of repeated vectors with occasional single-category changes.
inline std::vector<FrameVectors> random_vectors(std::mt19937_64 & rng, std::size_t n)
{
  std::vector<FrameVectors> out;
  out.push_back(random_frame(rng));
  while (out.size() < n) {
    FrameVectors v = out.back();
    if (rng() % 5 == 0) {
      const FrameVectors fresh = random_frame(rng);
      switch (rng() % 4) {
        case 0:
          v.map = fresh.map;
          break;
        case 1:
          v.perc = fresh.perc;
          break;
        case 2:
          v.pln = fresh.pln;
          break;
        default:
          v = fresh;
      }
    }
    out.push_back(v);
  }
  return out;
}

inline bool irrelevant(const FrameVectors & v)
{
  if (v.map.near_junction || v.map.near_crosswalk || v.map.near_stop_sign) {
    return false;
  }
  if (!v.perc.approaching.empty() || !v.perc.near.empty()) {
    return false;
  }
  return v.perc.caution_predicted.empty() && v.perc.ignore_predicted.empty();
}

struct LiteralResult
{
  std::vector<std::pair<std::size_t, std::size_t>> segments;  // 1-based, inclusive
  std::pair<std::size_t, std::size_t> kept;
};

/// Step-by-step segmenting and backward pruning with 1-based frame numbers.
/// A cut at i closes the open segment at i-1; the forced cut at i = n closes it at n.
inline LiteralResult algorithm1(const std::vector<FrameVectors> & V0, const VotingWeights & w, double th_m)
{
  const std::size_t n = V0.size();
  auto V = [&](std::size_t i) -> const FrameVectors & { return V0[i - 1]; };
  std::vector<std::pair<std::size_t, std::size_t>> St;
  std::size_t ss = 1;
  std::size_t se = 0;
  for (std::size_t i = 2; i <= n; ++i) {
    VoteTuple v;
    if (!(V(i).map == V(i - 1).map) || i == n) {
      v.v_map = true;
    }
    if (!(V(i).perc == V(i - 1).perc) || i == n) {
      v.v_perc = true;
    }
    if (!(V(i).pln == V(i - 1).pln) || i == n) {
      v.v_pln = true;
    }
    if (eq1_vote(v, w)) {
      se = i;
      St.push_back({ss, se == n ? n : se - 1});
      ss = i;
    }
  }
  if (St.empty()) {
    St.push_back({1, n});
  }
  LiteralResult out;
  out.segments = St;
  auto S_a = St.back();
  St.pop_back();
  while (!St.empty()) {
    const auto S_curr = St.back();
    St.pop_back();
    std::size_t count = 0;
    for (std::size_t i = S_curr.first; i <= S_curr.second; ++i) {
      count += irrelevant(V(i)) ? 1 : 0;
    }
    const double r_m = static_cast<double>(count) / static_cast<double>(S_curr.second - S_curr.first + 1);
    if (r_m <= th_m) {
      if (S_curr.second + 1 == S_a.first) {
        S_a = {S_curr.first, S_a.second};
      }
    }
  }
  out.kept = S_a;
  return out;
}

/// Graph of a function of x, so the path never crosses itself.
inline std::vector<Vec2> random_polyline(std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> dx(1.0, 15.0);
  std::uniform_real_distribution<double> dy(-6.0, 6.0);
  const std::size_t n = 2 + rng() % 11;
  std::vector<Vec2> pts{{0.0, 0.0}};
  while (pts.size() < n) {
    pts.push_back({pts.back().x + dx(rng), pts.back().y + dy(rng)});
  }
  return pts;
}

/// About `total` points spread along the polyline by arc length, vertices included.
inline std::vector<Vec2> dense_samples(const std::vector<Vec2> & pts, std::size_t total)
{
  double length = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    length += distance(pts[i - 1], pts[i]);
  }
  std::vector<Vec2> out;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double len = distance(pts[i - 1], pts[i]);
    const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(total * len / length)));
    for (std::size_t k = 0; k < m; ++k) {
      const double u = static_cast<double>(k) / static_cast<double>(m);
      out.push_back({pts[i - 1].x + u * (pts[i].x - pts[i - 1].x), pts[i - 1].y + u * (pts[i].y - pts[i - 1].y)});
    }
  }
  out.push_back(pts.back());
  return out;
}

inline double nearest_distance(const std::vector<Vec2> & samples, Vec2 p)
{
  double best = std::numeric_limits<double>::infinity();
  for (const auto & q : samples) {
    best = std::min(best, std::hypot(q.x - p.x, q.y - p.y));
  }
  return best;
}

/// Constant-acceleration speed profile sampled every 0.1 s, stopping at v = 0.
inline StCurve random_curve(std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> vd(0.0, 15.0);
  std::uniform_real_distribution<double> ad(-3.0, 2.0);
  double v = vd(rng);
  const double a = ad(rng);
  double s = 0.0;
  std::vector<StSample> out;
  for (int k = 0; k <= 80; ++k) {
    out.push_back({0.1 * k, s, v});
    const double v_next = std::max(0.0, v + 0.1 * a);
    s += 0.05 * (v + v_next);
    v = v_next;
  }
  return StCurve(std::move(out));
}

/// Block of 0.1 s cells moving at a random speed near the curve.
inline StBlock random_block(std::mt19937_64 & rng, const StCurve & curve)
{
  std::uniform_real_distribution<double> t0d(0.0, 6.0);
  std::uniform_real_distribution<double> span(0.5, 2.0);
  std::uniform_real_distribution<double> offset(-25.0, 25.0);
  std::uniform_real_distribution<double> vd(-5.0, 15.0);
  std::uniform_real_distribution<double> half(2.5, 6.0);
  const double t0 = t0d(rng);
  const double t1 = std::min(8.0, t0 + span(rng));
  const double c0 = *curve.s_at(t0) + offset(rng);
  const double vn = vd(rng);
  const double h = half(rng);
  StBlock b;
  b.npc_id = 1;
  for (int k = 0; t0 + 0.1 * k <= t1 + 1e-9; ++k) {
    const double t = t0 + 0.1 * k;
    const double c = c0 + vn * (t - t0);
    b.cells.push_back({t, c - h, c + h});
  }
  return b;
}

inline double interp(const std::vector<StSample> & smp, double t)
{
  for (std::size_t i = 0; i + 1 < smp.size(); ++i) {
    if (t <= smp[i + 1].t) {
      const double r = (t - smp[i].t) / (smp[i + 1].t - smp[i].t);
      return smp[i].s + r * (smp[i + 1].s - smp[i].s);
    }
  }
  return smp.back().s;
}

/// Earliest sampled time at which the curve lies inside the band of a cell
/// whose time is within half a cell spacing, searched on a fixed grid.
inline std::optional<double> sampled_intersect(const StCurve & curve, const StBlock & block, double tol, double dt)
{
  const auto & cells = block.cells;
  const double h = cells.size() > 1 ? 0.5 * (cells[1].t - cells[0].t) : 0.0;
  const auto & smp = curve.samples();
  const auto steps = static_cast<long>(std::floor((smp.back().t - smp.front().t) / dt + 1e-9));
  for (long k = 0; k <= steps; ++k) {
    const double t = smp.front().t + dt * static_cast<double>(k);
    if (t < cells.front().t - 1e-12 || t > cells.back().t + 1e-12) {
      continue;
    }
    const double s = interp(smp, t);
    for (const auto & c : cells) {
      if (std::abs(t - c.t) <= h + 1e-12 && s >= c.s_lo - tol && s <= c.s_hi + tol) {
        return t;
      }
    }
  }
  return std::nullopt;
}

/// Per-frame events shaped like the worked example: a quiet start, motion
/// planning with skidding from 0.4 s, a prediction and behavioural fault
/// window from 0.8 s to 2.6 s, and the collision at frame 54.
inline CausalityReport timeline_report()
{
  const CausalEvent motion{CausalEventKind::wrong_motion_planning, std::nullopt, 0, 0,
                           "planned speed profile runs into the obstacle block."};
  const CausalEvent skid{CausalEventKind::vehicle_out_of_control, std::nullopt, 0, 0,
                         "actual trajectory deviates 0.7 m from the plan."};
  const CausalEvent prio{CausalEventKind::wrong_priority_prediction, 2, 0, 0, "priority predicted as 'ignore'."};
  const CausalEvent ovtk{CausalEventKind::wrong_behavioral_planning, 4, 0, 0, "risky 'overtake' decision."};
  std::vector<FrameEvents> per_frame;
  for (std::size_t f = 5; f <= 54; ++f) {
    FrameEvents fe{f, {}};
    if (f >= 10 && f < 32) {
      fe.events.push_back(prio);
      fe.events.push_back(ovtk);
    }
    fe.events.push_back(motion);
    fe.events.push_back(skid);
    per_frame.push_back(fe);
  }
  CausalityReport r = aggregate(per_frame, 0.08, 0, 54);
  r.recording_id = "timeline";
  r.accident = AccidentInfo{54, r.time_of(54), 2};
  return r;
}

}  // namespace oracle
