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

#ifndef TRIPLELOOP__CONTROL_HPP_
#define TRIPLELOOP__CONTROL_HPP_

#include "tripleloop/core.hpp"
#include "tripleloop/perception.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

namespace tripleloop
{

struct ControllerGains
{
  double k_distance{0.25};    // [1/s^2]
  double k_speed{0.5};        // [1/s]
  double lead_speed_time_constant{0.5};
  double cruise_kp{0.6};
  double cruise_ki{0.05};
  double cruise_integral_band{2.0};  // integrate only while |set - v| is below this [m/s]
  double standoff{2.5};
  double time_headway{1.45};
  double accel_min{-3.5};
  double accel_max{2.0};
  double min_lookahead{8.0};  // pure pursuit floor [m]
};

struct ControllerState
{
  double set_speed{0.0};
  /// Low-passed range rate d(d_hat)/dt, i.e. lead speed relative to ego.
  double lead_speed_estimate{0.0};
  std::optional<double> prev_perceived_distance{};
  double integrator{0.0};
  double standoff{2.5};
  double time_headway{1.45};
  // Range rate from the latest pair of frames, held between frames.
  double raw_range_rate{0.0};
  double since_last_frame{0.0};
};

inline ControllerState make_controller_state(double set_speed, const ControllerGains & gains)
{
  ControllerState s;
  s.set_speed = set_speed;
  s.standoff = gains.standoff;
  s.time_headway = gains.time_headway;
  return s;
}

struct ControlCommand
{
  double accel_cmd{0.0};
  double steer_cmd{0.0};
};

/// Constant time-headway gap policy.
inline double target_gap(double v_ego, const ControllerState & state)
{
  if (!(v_ego >= 0.0)) throw std::invalid_argument("target_gap: speed must be >= 0");
  return state.standoff + state.time_headway * v_ego;
}

/// Gap-and-rate law toward the perceived lead, capped by the cruise PI.
/// new_frame marks the first tick a perception frame is seen; the frame is
/// otherwise held.
inline std::pair<double, ControllerState> longitudinal_command(
  const PerceptionFrame & frame, double v_ego_est, ControllerState state, const ControllerGains & gains, double dt,
  bool new_frame = true)
{
  if (!(dt > 0.0)) throw std::invalid_argument("longitudinal_command: dt must be > 0");

  const double speed_error = state.set_speed - v_ego_est;
  if (std::abs(speed_error) < gains.cruise_integral_band) {
    state.integrator += speed_error * dt;
  }
  const double cruise = std::clamp(
    gains.cruise_kp * speed_error + gains.cruise_ki * state.integrator, gains.accel_min, gains.accel_max);

  if (!frame.detection || !frame.perceived_distance) {
    state.prev_perceived_distance.reset();
    state.lead_speed_estimate = 0.0;
    state.raw_range_rate = 0.0;
    state.since_last_frame = 0.0;
    return {cruise, state};
  }

  const double d_hat = *frame.perceived_distance;
  state.since_last_frame += dt;
  if (new_frame) {
    if (state.prev_perceived_distance) {
      state.raw_range_rate = (d_hat - *state.prev_perceived_distance) / state.since_last_frame;
    }
    state.prev_perceived_distance = d_hat;
    state.since_last_frame = 0.0;
  }
  const double alpha = dt / (gains.lead_speed_time_constant + dt);
  state.lead_speed_estimate += alpha * (state.raw_range_rate - state.lead_speed_estimate);

  const double v_lead = std::max(0.0, v_ego_est + state.lead_speed_estimate);
  const double follow = std::clamp(
    gains.k_distance * (d_hat - target_gap(std::max(v_ego_est, 0.0), state)) + gains.k_speed * (v_lead - v_ego_est),
    gains.accel_min, gains.accel_max);
  return {std::min(follow, cruise), state};
}

/// Pure pursuit toward the 500 ms prediction point; returns a steering-wheel angle.
inline double lateral_command(
  const Pose & ego_pose, const Pose & target, double v_ego, const VehicleParams & params, double min_lookahead = 1.0)
{
  if (!(v_ego >= 0.0)) throw std::invalid_argument("lateral_command: speed must be >= 0");
  const double dx = target.x - ego_pose.x;
  const double dy = target.y - ego_pose.y;
  const double c = std::cos(ego_pose.heading);
  const double s = std::sin(ego_pose.heading);
  const double forward = c * dx + s * dy;
  const double left = -s * dx + c * dy;
  if (!(forward > 0.0)) throw std::invalid_argument("lateral_command: target is not ahead of the vehicle");

  const double alpha = std::atan2(left, forward);
  const double lookahead = std::max(std::hypot(dx, dy), min_lookahead);
  const double curvature = 2.0 * std::sin(alpha) / lookahead;
  const double steer = std::atan(curvature * params.wheelbase) * params.steering_ratio;
  return std::clamp(steer, -params.steer_limit, params.steer_limit);
}

}  // namespace tripleloop

#endif  // TRIPLELOOP__CONTROL_HPP_
