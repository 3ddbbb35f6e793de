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

#include "tripleloop/scenario.hpp"

#include <gtest/gtest.h>

#include <memory>
#include <stdexcept>

namespace tripleloop
{
namespace
{

std::shared_ptr<const Road> default_road() { return std::make_shared<const Road>(Road::default_road()); }

TEST(Scenario, StoppingDefaults)
{
  const ScenarioSpec s = build_stopping_scenario(default_road(), LeadClass::Ambulance);
  EXPECT_EQ(s.driving_type, DrivingType::Stopping);
  EXPECT_DOUBLE_EQ(s.lead_spawn_arclength, 125.0);
  EXPECT_NEAR(s.ego_set_speed, 13.4112, 1e-12);
  EXPECT_DOUBLE_EQ(s.lead_cruise_speed, 0.0);
  EXPECT_DOUBLE_EQ(s.max_duration, 60.0);
  const LeadState lead = spawn_lead(s);
  EXPECT_DOUBLE_EQ(lead.rear_offset, 3.17);
  EXPECT_DOUBLE_EQ(lead.pose.x, 125.0);
}

TEST(Scenario, FollowingDefaults)
{
  const ScenarioSpec s = build_following_scenario(default_road(), LeadClass::BlackSedan);
  EXPECT_NEAR(s.ego_set_speed, 15.6464, 1e-12);
  EXPECT_NEAR(s.lead_cruise_speed, 13.4112, 1e-12);
  EXPECT_DOUBLE_EQ(s.trigger_distance, 15.0);
  EXPECT_DOUBLE_EQ(s.end_arclength, 695.0);
}

TEST(Scenario, RejectsShortRoads)
{
  const auto short_road = std::make_shared<const Road>(std::vector<RoadSegment>{Straight{150.0}});
  EXPECT_THROW(build_stopping_scenario(short_road, LeadClass::BlackSedan), std::invalid_argument);
  const auto medium = std::make_shared<const Road>(std::vector<RoadSegment>{Straight{700.0}});
  EXPECT_THROW(build_following_scenario(medium, LeadClass::BlackSedan), std::invalid_argument);
  EXPECT_THROW(build_stopping_scenario(nullptr, LeadClass::BlackSedan), std::invalid_argument);
}

TEST(LeadStep, AccelerationClampExample)
{
  const Road road = Road::default_road();
  LeadState lead;
  lead.pose = road.pose_at(30.0);
  lead.station = 30.0;
  const LeadState next = lead_step(lead, road, 13.4112, 0.01);
  EXPECT_NEAR(next.speed, 0.02, 1e-15);
  EXPECT_NEAR(next.station, 30.0002, 1e-12);
}

TEST(LeadStep, ProportionalRegionExample)
{
  const Road road = Road::default_road();
  LeadState lead;
  lead.speed = 13.0;
  const LeadState next = lead_step(lead, road, 13.4, 0.01, 1.5, 2.0);
  EXPECT_NEAR(next.speed, 13.0 + 1.5 * 0.4 * 0.01, 1e-12);
}

TEST(LeadStep, NeverOvershootsCruise)
{
  const Road road = Road::default_road();
  for (double gain : {0.5, 1.5, 150.0, 500.0}) {
    LeadState lead;
    for (int k = 0; k < 3000; ++k) {
      lead = lead_step(lead, road, 13.4112, 0.01, gain, 2.0);
      EXPECT_LE(lead.speed, 13.4112);
    }
    LeadState fast;
    fast.speed = 20.0;
    for (int k = 0; k < 3000; ++k) {
      fast = lead_step(fast, road, 13.4112, 0.01, gain, 2.0);
      EXPECT_GE(fast.speed, 13.4112);
    }
  }
}

TEST(LeadStep, RidesCenterline)
{
  const Road road = Road::default_road();
  LeadState lead;
  lead.speed = 13.0;
  lead.station = 190.0;
  for (int k = 0; k < 2000; ++k) lead = lead_step(lead, road, 13.0, 0.01);
  const Pose expected = road.pose_at(lead.station);
  EXPECT_DOUBLE_EQ(lead.pose.x, expected.x);
  EXPECT_DOUBLE_EQ(lead.pose.y, expected.y);
  EXPECT_THROW(lead_step(lead, road, 13.0, 0.0), std::invalid_argument);
}

}  // namespace
}  // namespace tripleloop
