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

#include "tripleloop/analysis.hpp"
#include "tripleloop/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tripleloop
{
namespace
{

SampleRecord record(double d, double v, std::optional<double> d_hat = std::nullopt)
{
  SampleRecord r;
  r.true_distance = d;
  r.ego.speed = v;
  r.perceived_distance = d_hat;
  return r;
}

TEST(PointLineDistance, Examples)
{
  EXPECT_DOUBLE_EQ(point_line_distance({0, 1, 0}, {0, 0, 0}, {2, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(point_line_distance({5, -3, 0}, {0, 0, 0}, {2, 0, 0}), 3.0);
  EXPECT_NEAR(point_line_distance({0, 1, 0}, {0, 0, 0}, {1, 1, 0}), std::sqrt(0.5), 1e-15);
  EXPECT_THROW(point_line_distance({0, 1, 0}, {1, 1, 0}, {1, 1, 0}), std::invalid_argument);
}

TEST(MinTtc, Examples)
{
  RunLog log;
  log.records = {record(40.0, 10.0), record(20.0, 10.0), record(3.0, 0.05), record(5.0, 1.0)};
  EXPECT_DOUBLE_EQ(min_ttc(log), 2.0);
  log.terminal = Terminal::Collision;
  EXPECT_DOUBLE_EQ(min_ttc(log), 0.0);
  RunLog idle;
  idle.records = {record(10.0, 0.0)};
  EXPECT_THROW(min_ttc(idle), std::invalid_argument);
}

TEST(DetectionRatio, WindowAndMisses)
{
  RunLog log;
  log.records = {record(40.0, 1.0, 48.0), record(20.0, 1.0, 22.0), record(8.0, 1.0, 16.0), record(30.0, 1.0)};
  EXPECT_NEAR(mean_detection_ratio(log, 10.0), (1.2 + 1.1) / 2.0, 1e-15);
  EXPECT_NEAR(mean_detection_ratio(log, 0.0), (1.2 + 1.1 + 2.0) / 3.0, 1e-15);
  EXPECT_THROW(mean_detection_ratio(log, 100.0), std::invalid_argument);
}

TEST(FollowingDistance, Mean)
{
  RunLog log;
  log.records = {record(10.0, 1.0), record(20.0, 1.0), record(33.0, 1.0)};
  EXPECT_DOUBLE_EQ(mean_following_distance(log), 21.0);
}

TEST(CenterlineDistance, OffsetOnStraight)
{
  const Road road(std::vector<RoadSegment>{Straight{100.0}});
  RunLog log;
  for (double x = 1.3; x < 90.0; x += 3.1) {
    SampleRecord r;
    r.ego.pose = {x, 0.4, 0.0};
    r.predicted_pose_500ms = {x + 5.0, -0.2, 0.0};
    log.records.push_back(r);
  }
  EXPECT_NEAR(mean_centerline_distance(log, road, false), 0.4, 1e-12);
  EXPECT_NEAR(mean_centerline_distance(log, road, true), 0.2, 1e-12);
}

TEST(ComputeMetrics, WindowFollowsDrivingType)
{
  AnalysisOptions opt;
  EXPECT_DOUBLE_EQ(dr_window_for(DrivingType::Stopping, opt), 10.0);
  EXPECT_DOUBLE_EQ(dr_window_for(DrivingType::Following, opt), 0.0);
}

MetricRecord metric(const std::string & id, double x, double y)
{
  MetricRecord m;
  m.run_id = id;
  m.dr = x;
  m.min_ttc = y;
  m.fd = 30.0 - 10.0 * x;
  m.cd_hat = 0.1 * x;
  m.cd = 0.11 * x + 0.01;
  return m;
}

std::vector<ConditionMetrics> fixture(const std::vector<std::string> & labels, double offset)
{
  std::vector<ConditionMetrics> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (auto type : {DrivingType::Stopping, DrivingType::Following}) {
      ConditionMetrics c;
      c.label = std::string(to_string(type)) + "/" + labels[i];
      c.driving_type = type;
      for (int k = 0; k < 3; ++k) {
        const double x = 1.0 + 0.1 * static_cast<double>(i) + 0.01 * k + offset;
        c.runs.push_back(metric(c.label + "/" + std::to_string(k), x, 3.0 - 2.0 * x + 0.003 * ((k * 7 + i) % 3)));
      }
      out.push_back(c);
    }
  }
  return out;
}

TEST(BuildTables, FiveConditionFixture)
{
  const std::vector<std::string> labels{"A", "B", "C", "D", "E"};
  const Tables t = build_tables(fixture(labels, 0.0), fixture(labels, 0.002));
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.rows[0].driving_type, DrivingType::Stopping);
  EXPECT_EQ(t.rows[0].diagnosis.n, 15u);
  EXPECT_EQ(t.rows[0].prediction.n, 5u);
  EXPECT_LT(t.rows[0].diagnosis.r, -0.99);
  EXPECT_LT(t.rows[0].prediction.r, -0.99);
  EXPECT_LT(t.rows[1].prediction.r, -0.99);
  EXPECT_GT(t.rows[2].prediction.r, 0.99);
  EXPECT_EQ(t.rows[0].prediction_points.size(), 5u);
  const auto & pt = t.rows[0].prediction_points.front();
  EXPECT_LE(pt.x_summary.min, pt.x);
  EXPECT_GE(pt.x_summary.max, pt.x);
}

TEST(BuildTables, TooFewMatchedConditions)
{
  const auto vil = fixture({"A", "B", "C"}, 0.0);
  EXPECT_THROW(build_tables(vil, fixture({"A", "B", "Z"}, 0.0)), std::invalid_argument);
  auto empty = vil;
  empty.front().runs.clear();
  EXPECT_THROW(build_tables(empty, vil), std::invalid_argument);
}

}  // namespace
}  // namespace tripleloop
