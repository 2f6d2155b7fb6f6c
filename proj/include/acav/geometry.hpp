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
#include <array>
#include <cmath>
#include <limits>

namespace acav
{

struct Vec2
{
  double x{0.0};
  double y{0.0};

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double k) const { return {x * k, y * k}; }
  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  constexpr bool operator==(const Vec2 &) const = default;

  static Vec2 unit(double heading) { return {std::cos(heading), std::sin(heading)}; }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Rectangle with arbitrary heading; length runs along the heading axis.
struct OrientedBox
{
  Vec2 center;
  double heading{0.0};
  double length{0.0};
  double width{0.0};

  Vec2 axis() const { return Vec2::unit(heading); }
  Vec2 normal() const { return Vec2::unit(heading + M_PI_2); }

  std::array<Vec2, 4> corners() const
  {
    const Vec2 a = axis() * (0.5 * length);
    const Vec2 n = normal() * (0.5 * width);
    return {center + a + n, center - a + n, center - a - n, center + a - n};
  }

  bool contains(Vec2 p) const
  {
    const Vec2 d = p - center;
    return std::abs(d.dot(axis())) <= 0.5 * length && std::abs(d.dot(normal())) <= 0.5 * width;
  }

  /// Same box grown by `margin` on every side.
  OrientedBox inflated(double margin) const
  {
    return {center, heading, length + 2.0 * margin, width + 2.0 * margin};
  }

  double circumradius() const { return 0.5 * std::hypot(length, width); }
};

/// Separating-axis test over the four edge normals of the two boxes.
/// Touching boxes (zero gap) count as overlapping.
inline bool boxes_overlap(const OrientedBox & a, const OrientedBox & b)
{
  if (distance(a.center, b.center) > a.circumradius() + b.circumradius()) {
    return false;
  }
  const auto ca = a.corners();
  const auto cb = b.corners();
  const std::array<Vec2, 4> axes{a.axis(), a.normal(), b.axis(), b.normal()};
  for (const Vec2 & ax : axes) {
    double amin = std::numeric_limits<double>::infinity();
    double amax = -amin;
    double bmin = amin;
    double bmax = -amin;
    for (const Vec2 & p : ca) {
      const double v = p.dot(ax);
      amin = std::min(amin, v);
      amax = std::max(amax, v);
    }
    for (const Vec2 & p : cb) {
      const double v = p.dot(ax);
      bmin = std::min(bmin, v);
      bmax = std::max(bmax, v);
    }
    if (amax < bmin || bmax < amin) {
      return false;
    }
  }
  return true;
}

/// Closest point on segment [a, b] to p, as the clamped parameter in [0, 1].
inline double closest_param_on_segment(Vec2 a, Vec2 b, Vec2 p)
{
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  if (len2 <= 0.0) {
    return 0.0;
  }
  return std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
}

/// Euclidean distance from p to the box (zero when inside).
inline double distance_to_box(const OrientedBox & box, Vec2 p)
{
  const Vec2 d = p - box.center;
  const double u = std::max(0.0, std::abs(d.dot(box.axis())) - 0.5 * box.length);
  const double v = std::max(0.0, std::abs(d.dot(box.normal())) - 0.5 * box.width);
  return std::hypot(u, v);
}

}  // namespace acav
