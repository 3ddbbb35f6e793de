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

#ifndef TRIPLELOOP__SCENARIO_HPP_
#define TRIPLELOOP__SCENARIO_HPP_

#include "tripleloop/core.hpp"
#include "tripleloop/road.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

namespace tripleloop
{

/// Knobs shared by both driving types. Defaults follow the documented test protocol.
struct ScenarioParams
{
  double stopping_lead_arclength{125.0};
  double stopping_set_speed{mph_to_mps(30.0)};
  double stopping_max_duration{60.0};
  double stop_speed_threshold{0.1};
  double stop_hold_seconds{1.0};

  double following_lead_arclength{30.0};
  double following_set_speed{mph_to_mps(35.0)};
  double following_lead_cruise{mph_to_mps(30.0)};
  double following_trigger_distance{15.0};
  double following_end_arclength{695.0};
  double following_max_duration{150.0};

  double lead_speed_gain{1.5};
  double lead_accel_limit{2.0};
};

struct ScenarioSpec
{
  DrivingType driving_type{DrivingType::Stopping};
  std::shared_ptr<const Road> road;
  LeadClass lead_class{LeadClass::BlackSedan};
  double lead_spawn_arclength{125.0};
  double ego_set_speed{0.0};
  double lead_cruise_speed{0.0};
  /// Following only: lead starts cruising and logging starts once d_t <= this.
  double trigger_distance{0.0};
  /// Following only: run completes when the ego station reaches this.
  double end_arclength{0.0};
  double max_duration{60.0};
  double stop_speed_threshold{0.1};
  double stop_hold_seconds{1.0};
  double lead_speed_gain{1.5};
  double lead_accel_limit{2.0};
  std::string engage_rule;
  std::string termination_rule;
};

inline ScenarioSpec build_stopping_scenario(
  std::shared_ptr<const Road> road, LeadClass lead_class, const ScenarioParams & p = {})
{
  if (!road) throw std::invalid_argument("build_stopping_scenario: null road");
  if (road->length() < 200.0) throw std::invalid_argument("build_stopping_scenario: road shorter than 200 m");
  ScenarioSpec s;
  s.driving_type = DrivingType::Stopping;
  s.road = std::move(road);
  s.lead_class = lead_class;
  s.lead_spawn_arclength = p.stopping_lead_arclength;
  s.ego_set_speed = p.stopping_set_speed;
  s.lead_cruise_speed = 0.0;
  s.max_duration = p.stopping_max_duration;
  s.stop_speed_threshold = p.stop_speed_threshold;
  s.stop_hold_seconds = p.stop_hold_seconds;
  s.lead_speed_gain = p.lead_speed_gain;
  s.lead_accel_limit = p.lead_accel_limit;
  s.engage_rule = "control engaged and logging from t = 0";
  s.termination_rule = "ego stopped for the hold time, collision (d <= 0), or timeout";
  return s;
}

inline ScenarioSpec build_following_scenario(
  std::shared_ptr<const Road> road, LeadClass lead_class, const ScenarioParams & p = {})
{
  if (!road) throw std::invalid_argument("build_following_scenario: null road");
  if (road->length() < 750.0) throw std::invalid_argument("build_following_scenario: road shorter than 750 m");
  ScenarioSpec s;
  s.driving_type = DrivingType::Following;
  s.road = std::move(road);
  s.lead_class = lead_class;
  s.lead_spawn_arclength = p.following_lead_arclength;
  s.ego_set_speed = p.following_set_speed;
  s.lead_cruise_speed = p.following_lead_cruise;
  s.trigger_distance = p.following_trigger_distance;
  s.end_arclength = p.following_end_arclength;
  s.max_duration = p.following_max_duration;
  s.stop_speed_threshold = p.stop_speed_threshold;
  s.stop_hold_seconds = p.stop_hold_seconds;
  s.lead_speed_gain = p.lead_speed_gain;
  s.lead_accel_limit = p.lead_accel_limit;
  s.engage_rule = "lead starts cruising and logging starts once d <= trigger distance";
  s.termination_rule = "ego station reaches the end arc length, collision (d <= 0), or timeout";
  return s;
}

inline LeadState spawn_lead(const ScenarioSpec & spec)
{
  LeadState lead;
  lead.station = spec.lead_spawn_arclength;
  lead.pose = spec.road->pose_at(lead.station);
  lead.speed = 0.0;
  lead.rear_offset = rear_offset_for(spec.lead_class);
  return lead;
}

/// Proportional speed tracking with an acceleration clamp; the lead rides the
/// centerline exactly.
inline LeadState lead_step(
  LeadState lead, const Road & road, double cruise_speed, double dt, double gain = 1.5, double accel_limit = 2.0)
{
  if (!(dt > 0.0)) throw std::invalid_argument("lead_step: dt must be > 0");
  const double accel = std::clamp(gain * (cruise_speed - lead.speed), -accel_limit, accel_limit);
  double next = lead.speed + accel * dt;
  // A proportional step can only overshoot when gain * dt > 1.
  if ((accel > 0.0 && next > cruise_speed) || (accel < 0.0 && next < cruise_speed)) next = cruise_speed;
  lead.speed = std::max(0.0, next);
  lead.station += lead.speed * dt;
  lead.pose = road.pose_at(lead.station);
  return lead;
}

}  // namespace tripleloop

#endif  // TRIPLELOOP__SCENARIO_HPP_
