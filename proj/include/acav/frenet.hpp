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
#include <cmath>
#include <limits>
#include <vector>

#include "acav/common.hpp"
#include "acav/geometry.hpp"

namespace acav
{

struct FrenetCoord
{
  double s{0.0};  // station along the path
  double l{0.0};  // signed lateral offset, left positive
};

/// Polyline reference path with cumulative arc length.
class ReferencePath
{
public:
  ReferencePath() = default;

  /// Consecutive points closer than 1e-9 m are merged; at least two distinct
  /// points must remain.
  explicit ReferencePath(const std::vector<Vec2> & points)
  {
    for (const Vec2 & p : points) {
      if (points_.empty() || distance(points_.back(), p) > 1e-9) {
        points_.push_back(p);
      }
    }
    if (points_.size() < 2) {
      throw InputError("reference path needs at least two distinct points");
    }
    cumulative_s_.reserve(points_.size());
    cumulative_s_.push_back(0.0);
    for (std::size_t i = 1; i < points_.size(); ++i) {
      cumulative_s_.push_back(cumulative_s_.back() + distance(points_[i - 1], points_[i]));
    }
  }

  const std::vector<Vec2> & points() const { return points_; }
  const std::vector<double> & cumulative_s() const { return cumulative_s_; }
  double length() const { return cumulative_s_.empty() ? 0.0 : cumulative_s_.back(); }
  std::size_t segment_count() const { return points_.size() - 1; }

  FrenetCoord project(Vec2 p) const
  {
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    double best_u = 0.0;
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
      const double u = closest_param_on_segment(points_[i], points_[i + 1], p);
      const Vec2 foot = points_[i] + (points_[i + 1] - points_[i]) * u;
      const Vec2 d = p - foot;
      const double d2 = d.dot(d);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = i;
        best_u = u;
      }
    }
    const Vec2 a = points_[best];
    const Vec2 b = points_[best + 1];
    const Vec2 dir = (b - a) * (1.0 / (b - a).norm());
    const Vec2 foot = a + (b - a) * best_u;
    const double side = dir.cross(p - foot);
    const double mag = std::sqrt(best_d2);
    FrenetCoord c;
    c.s = cumulative_s_[best] + best_u * (cumulative_s_[best + 1] - cumulative_s_[best]);
    c.l = side < 0.0 ? -mag : mag;
    return c;
  }

  Vec2 point_at(double s) const
  {
    const std::size_t i = segment_at(s);
    const double seg = cumulative_s_[i + 1] - cumulative_s_[i];
    const double u = std::clamp((s - cumulative_s_[i]) / seg, 0.0, 1.0);
    return points_[i] + (points_[i + 1] - points_[i]) * u;
  }

  double heading_at(double s) const
  {
    const std::size_t i = segment_at(s);
    const Vec2 d = points_[i + 1] - points_[i];
    return std::atan2(d.y, d.x);
  }

  Vec2 to_cartesian(FrenetCoord c) const
  {
    return point_at(c.s) + Vec2::unit(heading_at(c.s) + M_PI_2) * c.l;
  }

private:
  std::size_t segment_at(double s) const
  {
    auto it = std::upper_bound(cumulative_s_.begin(), cumulative_s_.end(), s);
    std::size_t i = it == cumulative_s_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_s_.begin()) - 1;
    return std::min(i, segment_count() - 1);
  }

  std::vector<Vec2> points_;
  std::vector<double> cumulative_s_;
};

inline FrenetCoord project_to_frenet(const ReferencePath & path, Vec2 p) { return path.project(p); }

}  // namespace acav
