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

#include "tripleloop/control.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

namespace tripleloop
{
namespace
{

constexpr double kCurvature = 0.014919155006172635;  // 2 sin(0.05) / 6.7
constexpr double kSteer = 0.5735873240871109;        // atan(kCurvature * 2.69) * 14.3

TEST(TargetGap, ThirtyMph)
{
  const ControllerState s = make_controller_state(0.0, ControllerGains{});
  EXPECT_NEAR(target_gap(mph_to_mps(30.0), s), 21.94624, 1e-12);
  EXPECT_DOUBLE_EQ(target_gap(0.0, s), 2.5);
  EXPECT_THROW(target_gap(-1.0, s), std::invalid_argument);
}

TEST(LateralCommand, PurePursuitExample)
{
  VehicleParams p;
  const Pose target{6.7 * std::cos(0.05), 6.7 * std::sin(0.05), 0.0};
  EXPECT_NEAR(lateral_command({}, target, 13.4, p), kSteer, 1e-12);
  const double floored = std::atan(2.0 * std::sin(0.05) / 8.0 * p.wheelbase) * p.steering_ratio;
  EXPECT_NEAR(lateral_command({}, target, 13.4, p, 8.0), floored, 1e-12);
  EXPECT_NEAR(std::tan(kSteer / p.steering_ratio) / p.wheelbase, kCurvature, 1e-15);
}

TEST(LateralCommand, RotatedFrameGivesSameCommand)
{
  VehicleParams p;
  const double h = 1.1;
  const Pose ego{5.0, -3.0, h};
  const double a = h + 0.05;
  const Pose target{5.0 + 6.7 * std::cos(a), -3.0 + 6.7 * std::sin(a), 0.0};
  EXPECT_NEAR(lateral_command(ego, target, 13.4, p), kSteer, 1e-12);
}

TEST(LateralCommand, SaturatesAtSteerLimit)
{
  VehicleParams p;
  EXPECT_DOUBLE_EQ(lateral_command({}, {1.0, 1.0, 0.0}, 1.0, p), p.steer_limit);
  EXPECT_DOUBLE_EQ(lateral_command({}, {1.0, -1.0, 0.0}, 1.0, p), -p.steer_limit);
}

TEST(LateralCommand, RejectsTargetBehind)
{
  VehicleParams p;
  EXPECT_THROW(lateral_command({}, {-1.0, 0.0, 0.0}, 1.0, p), std::invalid_argument);
  EXPECT_THROW(lateral_command({}, {1.0, 0.0, 0.0}, -1.0, p), std::invalid_argument);
}

TEST(LongitudinalCommand, CruiseWithoutDetectionSaturates)
{
  const ControllerGains g;
  const ControllerState s = make_controller_state(mph_to_mps(30.0), g);
  const auto [a, next] = longitudinal_command(PerceptionFrame{}, 10.0, s, g, 0.01);
  EXPECT_DOUBLE_EQ(a, g.accel_max);
  EXPECT_DOUBLE_EQ(next.integrator, 0.0);
}

TEST(LongitudinalCommand, ZeroAtEquilibriumGap)
{
  const ControllerGains g;
  const double v = mph_to_mps(30.0);
  ControllerState s = make_controller_state(v, g);
  PerceptionFrame f;
  f.detection = true;
  f.perceived_distance = target_gap(v, s);
  const auto [a, next] = longitudinal_command(f, v, s, g, 0.01);
  EXPECT_NEAR(a, 0.0, 1e-12);
}

TEST(LongitudinalCommand, BrakesAtLimitWhenTooClose)
{
  const ControllerGains g;
  const double v = mph_to_mps(30.0);
  PerceptionFrame f;
  f.detection = true;
  f.perceived_distance = 5.0;
  const auto [a, next] = longitudinal_command(f, v, make_controller_state(v, g), g, 0.01);
  EXPECT_DOUBLE_EQ(a, g.accel_min);
}

TEST(LongitudinalCommand, EstimatesClosingRate)
{
  const ControllerGains g;
  ControllerState s = make_controller_state(10.0, g);
  double d = 60.0;
  for (int k = 0; k < 1000; ++k) {
    PerceptionFrame f;
    f.detection = true;
    const bool fresh = k % 5 == 0;
    if (fresh) d -= 2.0 * 0.05;
    f.perceived_distance = d;
    s = longitudinal_command(f, 10.0, s, g, 0.01, fresh).second;
  }
  EXPECT_NEAR(s.lead_speed_estimate, -2.0, 1e-6);
}

TEST(LongitudinalCommand, LostDetectionResetsRangeRate)
{
  const ControllerGains g;
  ControllerState s = make_controller_state(10.0, g);
  PerceptionFrame f;
  f.detection = true;
  f.perceived_distance = 30.0;
  s = longitudinal_command(f, 10.0, s, g, 0.01).second;
  s = longitudinal_command(PerceptionFrame{}, 10.0, s, g, 0.01).second;
  EXPECT_FALSE(s.prev_perceived_distance.has_value());
  EXPECT_DOUBLE_EQ(s.lead_speed_estimate, 0.0);
}

}  // namespace
}  // namespace tripleloop
