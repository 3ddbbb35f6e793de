// Copyright 2026 The tripleloop Authors
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

#include "tripleloop/random.hpp"
#include "tripleloop/road.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tripleloop
{
namespace
{

std::pair<std::size_t, std::size_t> brute_force_pair(const Road & road, double x, double y)
{
  const auto & c = road.centerline();
  std::vector<std::size_t> idx(c.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const auto dist = [&](std::size_t i) { return std::hypot(c[i].x - x, c[i].y - y); };
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double da = dist(a), db = dist(b);
    if (std::abs(da - db) <= 1e-9) return a > b;
    return da < db;
  });
  return {std::min(idx[0], idx[1]), std::max(idx[0], idx[1])};
}

TEST(Road, DefaultLengthAndEndpoints)
{
  const Road road = Road::default_road();
  EXPECT_NEAR(road.length(), 800.0, 1e-9);
  const Pose start = road.pose_at(0.0);
  EXPECT_DOUBLE_EQ(start.x, 0.0);
  EXPECT_DOUBLE_EQ(start.y, 0.0);
  const Pose corner = road.pose_at(200.0);
  EXPECT_NEAR(corner.x, 200.0, 1e-12);
  EXPECT_NEAR(corner.y, 0.0, 1e-12);
  // Right-hand arc: heading decreases by 600 / 400 rad.
  EXPECT_NEAR(road.pose_at(800.0).heading, -1.5, 1e-12);
}

TEST(Road, ArcSamplesLieOnCircle)
{
  const Road road = Road::default_road();
  // Right turn from (200, 0) heading +x: center at (200, -400).
  for (const auto & p : road.centerline()) {
    if (p.x <= 200.0 + 1e-9 && std::abs(p.y) < 1e-9) continue;
    EXPECT_NEAR(std::hypot(p.x - 200.0, p.y + 400.0), 400.0, 1e-3);
  }
}

TEST(Road, SampleSpacingIsOneMetre)
{
  const Road road = Road::default_road();
  const auto & c = road.centerline();
  ASSERT_EQ(c.size(), 801u);
  for (std::size_t i = 1; i < c.size(); ++i) EXPECT_NEAR(planar_distance(c[i - 1], c[i]), 1.0, 1e-5);
}

TEST(Road, NearestPairMatchesBruteForce)
{
  const Road road = Road::default_road();
  Rng rng(17);
  for (int i = 0; i < 400; ++i) {
    const Pose lane = road.pose_at(rng.uniform(0.0, 800.0));
    const double off = rng.uniform(-10.0, 10.0);
    const double x = lane.x - off * std::sin(lane.heading);
    const double y = lane.y + off * std::cos(lane.heading);
    EXPECT_EQ(road.nearest_pair_indices(x, y), brute_force_pair(road, x, y));
  }
}

TEST(Road, NearestPairTieGoesToLaterSample)
{
  const Road road({Straight{10.0}});
  // Equidistant from samples 3 and 4, then from 4 and 5.
  EXPECT_EQ(road.nearest_pair_indices(3.5, 0.0), (std::pair<std::size_t, std::size_t>{3, 4}));
  EXPECT_EQ(road.nearest_pair_indices(4.0, 0.0), (std::pair<std::size_t, std::size_t>{4, 5}));
}

TEST(Road, FarPointThrows)
{
  const Road road = Road::default_road();
  EXPECT_THROW(road.nearest_pair_indices(100.0, 80.0), std::out_of_range);
}

TEST(Road, StationOfInvertsPoseAt)
{
  const Road road = Road::default_road();
  for (double s = 0.5; s < 799.0; s += 13.7) {
    const Pose p = road.pose_at(s);
    EXPECT_NEAR(road.station_of(p.x, p.y), s, 2e-3);
  }
}

TEST(Road, ExtendsStraightPastEnd)
{
  const Road road({Straight{10.0}});
  const Pose p = road.pose_at(25.0);
  EXPECT_DOUBLE_EQ(p.x, 25.0);
  EXPECT_DOUBLE_EQ(p.y, 0.0);
}

TEST(Road, RejectsEmptyOrDegenerateSegments)
{
  EXPECT_THROW(Road(std::vector<RoadSegment>{}), std::invalid_argument);
  EXPECT_THROW(Road({Straight{0.0}}), std::invalid_argument);
  EXPECT_THROW(Road({Arc{-5.0, 1.0}}), std::invalid_argument);
}

}  // namespace
}  // namespace tripleloop
