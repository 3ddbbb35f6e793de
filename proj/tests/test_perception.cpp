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

#include "tripleloop/perception.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <stdexcept>

namespace tripleloop
{
namespace
{

TEST(FogFactor, Examples)
{
  const PerceptionCalibration c;
  EXPECT_DOUBLE_EQ(fog_factor(0.20, c), 1.0);
  EXPECT_NEAR(fog_factor(0.60, c), 1.20, 1e-15);
  EXPECT_DOUBLE_EQ(fog_factor(0.40, c), 1.0);
}

TEST(FogFactor, FlatBelowKneeAndIncreasingAbove)
{
  const PerceptionCalibration c;
  for (double f = 0.0; f < 0.40; f += 0.005) EXPECT_EQ(fog_factor(f, c), 1.0);
  for (double f = 0.40; f + 0.01 <= 1.0; f += 0.01) EXPECT_GT(fog_factor(f + 0.01, c), fog_factor(f, c));
}

TEST(RelativeSunAzimuth, CompassConvention)
{
  EXPECT_NEAR(relative_sun_azimuth_deg(180.0, 0.0), 0.0, 1e-12);
  EXPECT_NEAR(relative_sun_azimuth_deg(315.0, 0.0), -135.0, 1e-12);
  EXPECT_NEAR(relative_sun_azimuth_deg(90.0, 0.0), 90.0, 1e-12);
  EXPECT_NEAR(relative_sun_azimuth_deg(270.0, -kPi / 2.0), 0.0, 1e-12);
}

TEST(SunFactor, ConePeaksAndNeutralRegions)
{
  const PerceptionCalibration c;
  EXPECT_NEAR(sun_factor(0.0, 0.0, false, c), 0.85, 1e-15);
  EXPECT_NEAR(sun_factor(-135.0, 0.0, false, c), 1.20, 1e-15);
  EXPECT_DOUBLE_EQ(sun_factor(90.0, 10.0, false, c), 1.0);
  EXPECT_DOUBLE_EQ(sun_factor(0.0, 60.0, false, c), 1.0);
  EXPECT_DOUBLE_EQ(sun_factor(0.0, 0.0, true, c), 1.0);
  EXPECT_LT(sun_factor(0.0, 10.0, false, c), 1.0);
  EXPECT_GT(sun_factor(-135.0, 30.0, false, c), 1.0);
}

TEST(SunFactor, ContinuousInAzimuthAndAltitude)
{
  const PerceptionCalibration c;
  for (double alt = 0.0; alt <= 90.0; alt += 0.5) {
    for (double az = -180.0; az < 180.0; az += 0.05) {
      EXPECT_LT(std::abs(sun_factor(az + 0.05, alt, false, c) - sun_factor(az, alt, false, c)), 0.01);
      EXPECT_LT(std::abs(sun_factor(az, alt + 0.5, false, c) - sun_factor(az, alt, false, c)), 0.05);
    }
  }
}

TEST(Degradation, NoonClearSedanIsPresetBaseline)
{
  const PerceptionCalibration c;
  const Environment env = make_environment(EnvironmentPreset::NoonClear, LeadClass::BlackSedan, DrivingType::Stopping, c);
  const DegradationParams d = degradation_from_environment(env, 0.0, c);
  EXPECT_DOUBLE_EQ(d.distance_bias, c.entry(EnvironmentPreset::NoonClear).bias_black_sedan);
  EXPECT_DOUBLE_EQ(d.lateral_error_std, c.lateral_error_std);
}

TEST(Degradation, ComposesFogAndRain)
{
  const PerceptionCalibration c;
  Environment env;
  env.preset = EnvironmentPreset::Custom;
  env.rain_intensity = 1.0;
  env.fog_fraction = 0.6;
  env.sun_altitude = 45.0;
  env.sun_azimuth = 90.0;
  env.lead_class = LeadClass::Ambulance;
  const DegradationParams d = degradation_from_environment(env, 0.0, c);
  EXPECT_NEAR(d.distance_bias, c.entry(EnvironmentPreset::RainFog).bias_ambulance * 1.2, 1e-12);
  EXPECT_NEAR(d.lateral_error_std, c.lateral_error_std * (1.0 + c.rain_lateral_gain) * (1.0 + 0.2), 1e-12);
}

TEST(Degradation, CustomEnvironmentLightingRows)
{
  Environment env;
  env.preset = EnvironmentPreset::Custom;
  EXPECT_EQ(lighting_row(env), EnvironmentPreset::NoonClear);
  env.rain_intensity = 0.7;
  EXPECT_EQ(lighting_row(env), EnvironmentPreset::RainFog);
  env.night = true;
  EXPECT_EQ(lighting_row(env), EnvironmentPreset::Night);
}

TEST(MakeEnvironment, FollowingSunGlareUsesOwnAzimuth)
{
  const PerceptionCalibration c;
  EXPECT_DOUBLE_EQ(
    make_environment(EnvironmentPreset::SunGlare, LeadClass::BlackSedan, DrivingType::Following, c).sun_azimuth, 270.0);
  EXPECT_DOUBLE_EQ(
    make_environment(EnvironmentPreset::SunGlare, LeadClass::BlackSedan, DrivingType::Stopping, c).sun_azimuth, 180.0);
  EXPECT_THROW(make_environment(EnvironmentPreset::Custom, LeadClass::BlackSedan, DrivingType::Stopping, c),
               std::invalid_argument);
}

class PerceiveTest : public ::testing::Test
{
protected:
  Road road = Road::default_road();
  EgoState ego;
  LeadState lead;

  void SetUp() override
  {
    ego.pose = road.pose_at(20.0);
    ego.speed = 10.0;
    lead.station = 80.0;
    lead.pose = road.pose_at(lead.station);
  }
};

TEST_F(PerceiveTest, BiasScalesDistanceWithoutNoise)
{
  DegradationParams p;
  p.distance_bias = 1.3;
  auto [frame, state] = perceive(ego, lead, road, p, PerceptionState{0.0, Rng(1)}, 0.05);
  ASSERT_TRUE(frame.detection);
  EXPECT_NEAR(*frame.perceived_distance, 1.3 * (60.0 - lead.rear_offset), 1e-9);
}

TEST_F(PerceiveTest, BeyondRangeIsMissed)
{
  DegradationParams p;
  p.detection_range = 40.0;
  auto [frame, state] = perceive(ego, lead, road, p, PerceptionState{0.0, Rng(1)}, 0.05);
  EXPECT_FALSE(frame.detection);
  EXPECT_FALSE(frame.perceived_distance.has_value());
}

TEST_F(PerceiveTest, PredictionIsLanePointHalfSecondAhead)
{
  DegradationParams p;
  auto [frame, state] = perceive(ego, lead, road, p, PerceptionState{0.0, Rng(1)}, 0.05);
  const Pose expected = road.pose_at(25.0);
  EXPECT_NEAR(frame.predicted_pose_500ms.x, expected.x, 1e-9);
  EXPECT_NEAR(frame.predicted_pose_500ms.y, expected.y, 1e-9);
}

TEST_F(PerceiveTest, LateralErrorIsStationary)
{
  DegradationParams p;
  p.lateral_error_std = 0.3;
  PerceptionState st{0.0, Rng(123)};
  double sum = 0.0, sum2 = 0.0;
  constexpr int kSteps = 100000;
  for (int k = 0; k < kSteps; ++k) {
    auto [frame, next] = perceive(ego, lead, road, p, std::move(st), 0.05);
    st = std::move(next);
    sum += st.lateral_error;
    sum2 += st.lateral_error * st.lateral_error;
  }
  const double mean = sum / kSteps;
  const double var = sum2 / kSteps - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.03);
  EXPECT_NEAR(std::sqrt(var), 0.3, 0.02);
}

TEST_F(PerceiveTest, SameSeedSameFrames)
{
  DegradationParams p;
  p.distance_noise_std = 0.05;
  p.lateral_error_std = 0.2;
  PerceptionState a{0.0, Rng(8)}, b{0.0, Rng(8)};
  for (int k = 0; k < 100; ++k) {
    auto [fa, na] = perceive(ego, lead, road, p, std::move(a), 0.05);
    auto [fb, nb] = perceive(ego, lead, road, p, std::move(b), 0.05);
    EXPECT_EQ(*fa.perceived_distance, *fb.perceived_distance);
    EXPECT_EQ(fa.predicted_pose_500ms, fb.predicted_pose_500ms);
    a = std::move(na);
    b = std::move(nb);
  }
}

}  // namespace
}  // namespace tripleloop
