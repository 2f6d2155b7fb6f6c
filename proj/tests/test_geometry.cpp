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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "acav/geometry.hpp"

using namespace acav;

namespace
{

bool inside(const OrientedBox & b, double x, double y)
{
  const double c = std::cos(b.heading);
  const double s = std::sin(b.heading);
  const double dx = x - b.center.x;
  const double dy = y - b.center.y;
  return std::abs(dx * c + dy * s) <= 0.5 * b.length && std::abs(-dx * s + dy * c) <= 0.5 * b.width;
}

/// Overlap by dense sampling of both boxes' areas.
bool sampled_overlap(const OrientedBox & a, const OrientedBox & b, int n = 120)
{
  for (const auto * p : {&a, &b}) {
    const auto * q = p == &a ? &b : &a;
    const double c = std::cos(p->heading);
    const double s = std::sin(p->heading);
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const double u = (static_cast<double>(i) / n - 0.5) * p->length;
        const double v = (static_cast<double>(j) / n - 0.5) * p->width;
        if (inside(*q, p->center.x + u * c - v * s, p->center.y + u * s + v * c)) {
          return true;
        }
      }
    }
  }
  return false;
}

OrientedBox grown(OrientedBox b, double m) { return {b.center, b.heading, b.length + m, b.width + m}; }

}  // namespace

TEST(BoxOverlap, FarApartAxisAligned)
{
  const OrientedBox a{{0.0, 0.0}, 0.0, 4.0, 2.0};
  const OrientedBox b{{10.0, 0.0}, 0.0, 4.0, 2.0};
  EXPECT_FALSE(boxes_overlap(a, b));
}

TEST(BoxOverlap, IdenticalBoxes)
{
  const OrientedBox a{{3.0, -1.0}, 0.7, 4.0, 2.0};
  EXPECT_TRUE(boxes_overlap(a, a));
}

TEST(BoxOverlap, FortyFiveDegreesTwoMetresApart)
{
  const OrientedBox a{{0.0, 0.0}, 0.0, 4.0, 2.0};
  const OrientedBox b{{2.0, 0.0}, M_PI / 4.0, 4.0, 2.0};
  EXPECT_EQ(boxes_overlap(a, b), sampled_overlap(a, b));
  EXPECT_TRUE(boxes_overlap(a, b));
}

TEST(BoxOverlap, TouchingEdgesCountAsOverlap)
{
  const OrientedBox a{{0.0, 0.0}, 0.0, 4.0, 2.0};
  const OrientedBox b{{4.0, 0.0}, 0.0, 4.0, 2.0};
  EXPECT_TRUE(boxes_overlap(a, b));
  const OrientedBox c{{4.001, 0.0}, 0.0, 4.0, 2.0};
  EXPECT_FALSE(boxes_overlap(a, c));
}

TEST(BoxOverlap, CornerNearMissThatCircleTestWouldAccept)
{
  const OrientedBox a{{0.0, 0.0}, 0.0, 4.0, 2.0};
  const OrientedBox b{{4.3, 2.3}, M_PI / 4.0, 4.0, 2.0};
  EXPECT_EQ(boxes_overlap(a, b), sampled_overlap(a, b));
}

TEST(BoxOverlap, AgreesWithSamplingOracle)
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-6.0, 6.0);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::uniform_real_distribution<double> len(1.0, 5.0);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const OrientedBox a{{0.0, 0.0}, ang(rng), len(rng), len(rng)};
    const OrientedBox b{{pos(rng), pos(rng)}, ang(rng), len(rng), len(rng)};
    // Cases within sampling resolution of touching are left to the unit cases above.
    if (sampled_overlap(grown(a, -0.1), grown(b, -0.1)) != sampled_overlap(grown(a, 0.1), grown(b, 0.1))) {
      continue;
    }
    ++checked;
    EXPECT_EQ(boxes_overlap(a, b), sampled_overlap(a, b)) << "trial " << trial;
  }
  EXPECT_GT(checked, 200);
}

TEST(BoxOverlap, Symmetric)
{
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::uniform_real_distribution<double> len(0.5, 6.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const OrientedBox a{{pos(rng), pos(rng)}, ang(rng), len(rng), len(rng)};
    const OrientedBox b{{pos(rng), pos(rng)}, ang(rng), len(rng), len(rng)};
    EXPECT_EQ(boxes_overlap(a, b), boxes_overlap(b, a));
  }
}

TEST(OrientedBox, CornersAndContainment)
{
  const OrientedBox b{{1.0, 2.0}, M_PI / 2.0, 4.0, 2.0};
  for (const auto & c : b.corners()) {
    EXPECT_TRUE(b.contains(c + (b.center - c) * 1e-9));
  }
  EXPECT_TRUE(b.contains({1.0, 3.9}));
  EXPECT_FALSE(b.contains({2.5, 2.0}));
}

TEST(OrientedBox, InflatedGrowsEverySide)
{
  const OrientedBox b{{0.0, 0.0}, 0.3, 4.0, 2.0};
  const auto g = b.inflated(0.5);
  EXPECT_DOUBLE_EQ(g.length, 5.0);
  EXPECT_DOUBLE_EQ(g.width, 3.0);
  EXPECT_EQ(g.center, b.center);
}

TEST(DistanceToBox, OutsideAndInside)
{
  const OrientedBox b{{0.0, 0.0}, 0.0, 4.0, 2.0};
  EXPECT_NEAR(distance_to_box(b, {5.0, 0.0}), 3.0, 1e-12);
  EXPECT_NEAR(distance_to_box(b, {5.0, 5.0}), std::hypot(3.0, 4.0), 1e-12);
  EXPECT_NEAR(distance_to_box(b, {0.5, 0.5}), 0.0, 1e-12);
}
