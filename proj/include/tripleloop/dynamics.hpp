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

#ifndef TRIPLELOOP__DYNAMICS_HPP_
#define TRIPLELOOP__DYNAMICS_HPP_

#include "tripleloop/core.hpp"
#include "tripleloop/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

namespace tripleloop
{

// ---------------------------------------------------------------------------
// Kinematic bicycle
// ---------------------------------------------------------------------------

/// Road-wheel angle of the equivalent bicycle wheel from the steering-wheel angle.
inline double equivalent_wheel_angle(double steer_wheel_angle, double steering_ratio)
{
  if (!(steering_ratio > 0.0)) {
    throw std::invalid_argument("equivalent_wheel_angle: steering ratio must be > 0");
  }
  return steer_wheel_angle / steering_ratio;
}

/// Slip angle at the reference point located rear_axle_fraction * L ahead of
/// the rear axle; a fraction of 0 reduces to the rear-axle model (beta = 0).
inline double slip_angle(double wheel_angle, const VehicleParams & params)
{
  if (!(std::abs(wheel_angle) < kPi / 2.0)) {
    throw std::invalid_argument("slip_angle: |wheel angle| must be < pi/2");
  }
  return std::atan(params.rear_axle_fraction * std::tan(wheel_angle));
}

/// One explicit-Euler step of the planar kinematic bicycle.
inline Pose bicycle_step(
  const Pose & pose, double v, double wheel_angle, double slip, double dt, const VehicleParams & params)
{
  if (!(dt > 0.0)) throw std::invalid_argument("bicycle_step: dt must be > 0");
  if (!(v >= 0.0)) throw std::invalid_argument("bicycle_step: speed must be >= 0");
  Pose next;
  next.x = pose.x + v * std::cos(pose.heading) * dt;
  next.y = pose.y + v * std::sin(pose.heading) * dt;
  next.heading =
    normalize_angle(pose.heading + (v * std::tan(wheel_angle) * std::cos(slip) / params.wheelbase) * dt);
  return next;
}

// ---------------------------------------------------------------------------
// Wheel-speed fusion
// ---------------------------------------------------------------------------

struct SpeedFilter
{
  double estimate{0.0};
  double variance{1.0};
  double process_noise{1.0e-3};
  double measurement_noise{2.0e-3};

  void validate() const
  {
    if (!(variance > 0.0) || !(process_noise > 0.0) || !(measurement_noise > 0.0)) {
      throw std::invalid_argument("SpeedFilter: variance and noise parameters must be > 0");
    }
  }
};

/// Scalar constant-value Kalman update on the mean of the four wheel speeds.
inline SpeedFilter kalman_speed_update(SpeedFilter filter, const std::array<double, 4> & wheel_speeds)
{
  double sum = 0.0;
  for (double w : wheel_speeds) {
    if (!(w >= 0.0)) throw std::invalid_argument("kalman_speed_update: negative wheel speed");
    sum += w;
  }
  const double z = sum / 4.0;
  filter.variance += filter.process_noise;
  const double gain = filter.variance / (filter.variance + filter.measurement_noise);
  filter.estimate += gain * (z - filter.estimate);
  filter.variance *= (1.0 - gain);
  return filter;
}

// ---------------------------------------------------------------------------
// Plants
// ---------------------------------------------------------------------------

struct LaggedPlantState
{
  EgoState ego{};
  double accel_time_constant{0.45};
  double steer_time_constant{0.20};
  double wheel_noise_std{0.005};
  VehicleParams params{};
};

namespace detail
{
inline double relax_factor(double dt, double time_constant)
{
  // time_constant == 0 means the target is reached in one tick.
  return time_constant > 0.0 ? 1.0 - std::exp(-dt / time_constant) : 1.0;
}

inline void advance_pose(EgoState & ego, const VehicleParams & params, double dt)
{
  const double wheel = equivalent_wheel_angle(ego.steer_wheel_angle, params.steering_ratio);
  ego.slip_angle = slip_angle(wheel, params);
  ego.pose = bicycle_step(ego.pose, ego.speed, wheel, ego.slip_angle, dt, params);
}
}  // namespace detail

/// VIL-analog plant: first-order actuator lags, steering rate limit, noisy
/// wheel speeds fused by the Kalman filter. Kinematics use the true speed.
inline std::pair<LaggedPlantState, SpeedFilter> lagged_plant_step(
  LaggedPlantState state, SpeedFilter filter, double accel_cmd, double steer_cmd, double dt, Rng & rng)
{
  if (!(dt > 0.0)) throw std::invalid_argument("lagged_plant_step: dt must be > 0");
  const VehicleParams & p = state.params;
  EgoState & ego = state.ego;

  const double accel_target = std::clamp(accel_cmd, p.accel_min, p.accel_max);
  ego.accel_actual += (accel_target - ego.accel_actual) * detail::relax_factor(dt, state.accel_time_constant);

  const double steer_target = std::clamp(steer_cmd, -p.steer_limit, p.steer_limit);
  double steer_delta = (steer_target - ego.steer_wheel_angle) * detail::relax_factor(dt, state.steer_time_constant);
  const double max_delta = p.steer_rate_limit * dt;
  steer_delta = std::clamp(steer_delta, -max_delta, max_delta);
  ego.steer_wheel_angle += steer_delta;

  ego.speed = std::max(0.0, ego.speed + ego.accel_actual * dt);

  std::array<double, 4> wheels{};
  for (double & w : wheels) {
    w = std::max(0.0, ego.speed * (1.0 + rng.normal(state.wheel_noise_std)));
  }
  filter = kalman_speed_update(filter, wheels);

  detail::advance_pose(ego, p, dt);
  ego.speed_estimate = filter.estimate;
  return {state, filter};
}

/// SIL-analog plant: commands take effect within the tick.
inline EgoState ideal_plant_step(EgoState ego, double accel_cmd, double steer_cmd, double dt, const VehicleParams & params)
{
  if (!(dt > 0.0)) throw std::invalid_argument("ideal_plant_step: dt must be > 0");
  ego.accel_actual = std::clamp(accel_cmd, params.accel_min, params.accel_max);
  ego.steer_wheel_angle = std::clamp(steer_cmd, -params.steer_limit, params.steer_limit);
  ego.speed = std::max(0.0, ego.speed + ego.accel_actual * dt);
  detail::advance_pose(ego, params, dt);
  ego.speed_estimate = ego.speed;
  return ego;
}

// ---------------------------------------------------------------------------
// Rail replay
// ---------------------------------------------------------------------------

/// Kinematic samples at 10 ms spacing. Sample i+1 is reached from sample i by
/// bicycle_step(pose[i], speeds[i+1], wheel_angles[i+1]).
struct RailTrajectory
{
  std::vector<Pose> poses;
  std::vector<double> speeds;
  std::vector<double> wheel_angles;

  std::size_t size() const { return poses.size(); }

  void validate() const
  {
    if (poses.size() < 2 || speeds.size() != poses.size() || wheel_angles.size() != poses.size()) {
      throw std::invalid_argument("RailTrajectory: sequences must have equal length >= 2");
    }
  }
};

struct RailSample
{
  Pose pose;
  double speed;
  double wheel_angle;
};

inline RailSample rail_step(const RailTrajectory & traj, std::size_t tick_index)
{
  if (tick_index >= traj.size()) {
    throw std::out_of_range("rail_step: tick index beyond rail length");
  }
  return {traj.poses[tick_index], traj.speeds[tick_index], traj.wheel_angles[tick_index]};
}

}  // namespace tripleloop

#endif  // TRIPLELOOP__DYNAMICS_HPP_
