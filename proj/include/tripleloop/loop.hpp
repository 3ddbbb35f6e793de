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

#ifndef TRIPLELOOP__LOOP_HPP_
#define TRIPLELOOP__LOOP_HPP_

#include "tripleloop/control.hpp"
#include "tripleloop/core.hpp"
#include "tripleloop/dynamics.hpp"
#include "tripleloop/perception.hpp"
#include "tripleloop/random.hpp"
#include "tripleloop/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace tripleloop
{

/// VIL-analog actuation and measurement-chain constants.
struct PlantParams
{
  double accel_time_constant{0.45};
  double steer_time_constant{0.20};
  double wheel_noise_std{0.005};
  double filter_initial_variance{1.0};
  double filter_process_noise{1.0e-3};
  double filter_measurement_noise{2.0e-3};
};

/// Replaces individual fields of the environment-derived degradation.
struct DegradationOverride
{
  std::optional<double> distance_bias;
  std::optional<double> distance_noise_std;
  std::optional<double> lateral_error_std;
  std::optional<double> detection_range;
};

struct RunConfig
{
  Modality modality{Modality::VIL};
  ScenarioSpec scenario{};
  Environment environment{};
  VehicleParams vehicle{};
  ControllerGains gains{};
  PerceptionCalibration perception{};
  PlantParams plant{};
  DegradationOverride degradation{};
  std::uint64_t seed{0};
  std::string config_digest;
  /// MIL only: the closed-loop log whose kinematics are replayed.
  std::shared_ptr<const RunLog> rail_source;

  void validate() const
  {
    if (!scenario.road) throw std::invalid_argument("RunConfig: scenario has no road");
    vehicle.validate();
    environment.validate();
    if (modality == Modality::MIL) {
      if (!rail_source) throw std::invalid_argument("RunConfig: MIL requires a rail source log");
      if (rail_source->driving_type != scenario.driving_type) {
        throw std::invalid_argument("RunConfig: rail source driving type differs from the scenario");
      }
    }
  }
};

/// Instrumentation counters for one run.
struct RunStats
{
  std::size_t ticks{0};
  std::size_t controller_invocations{0};
  std::size_t perception_frames{0};
};

/// Upsamples a 20 Hz log to 10 ms rail points: speed and wheel angle are
/// interpolated linearly and the pose is re-integrated from each logged anchor.
inline RailTrajectory extract_rail(const RunLog & source, const VehicleParams & vehicle)
{
  if (source.modality == Modality::MIL) throw std::invalid_argument("extract_rail: source must be a closed-loop log");
  const auto & recs = source.records;
  if (recs.size() < 2) throw std::invalid_argument("extract_rail: source needs at least two records");
  for (std::size_t j = 1; j < recs.size(); ++j) {
    if (std::abs(recs[j].t - recs[j - 1].t - kSamplePeriod) > 1e-6) {
      throw std::invalid_argument("extract_rail: gap in source log at record " + std::to_string(j));
    }
  }

  RailTrajectory rail;
  const std::size_t n = kTicksPerSample * (recs.size() - 1) + 1;
  rail.poses.reserve(n);
  rail.speeds.reserve(n);
  rail.wheel_angles.reserve(n);
  const auto wheel_of = [&](const SampleRecord & r) {
    return equivalent_wheel_angle(r.ego.steer_wheel_angle, vehicle.steering_ratio);
  };

  for (std::size_t j = 0; j + 1 < recs.size(); ++j) {
    const double v0 = recs[j].ego.speed, v1 = recs[j + 1].ego.speed;
    const double w0 = wheel_of(recs[j]), w1 = wheel_of(recs[j + 1]);
    Pose pose = recs[j].ego.pose;
    rail.poses.push_back(pose);
    rail.speeds.push_back(v0);
    rail.wheel_angles.push_back(w0);
    for (int m = 1; m < kTicksPerSample; ++m) {
      const double u = static_cast<double>(m) / kTicksPerSample;
      const double v = v0 + (v1 - v0) * u;
      const double w = w0 + (w1 - w0) * u;
      pose = bicycle_step(pose, v, w, slip_angle(w, vehicle), kTickSeconds, vehicle);
      rail.poses.push_back(pose);
      rail.speeds.push_back(v);
      rail.wheel_angles.push_back(w);
    }
  }
  rail.poses.push_back(recs.back().ego.pose);
  rail.speeds.push_back(recs.back().ego.speed);
  rail.wheel_angles.push_back(wheel_of(recs.back()));
  return rail;
}

/// Largest gap between a rail segment integrated to its end and the next
/// logged anchor pose.
inline double rail_anchor_deviation(const RailTrajectory & rail, const VehicleParams & vehicle)
{
  double worst = 0.0;
  for (std::size_t i = 0; i + kTicksPerSample < rail.size(); i += kTicksPerSample) {
    Pose p = rail.poses[i];
    for (int m = 1; m <= kTicksPerSample; ++m) {
      const std::size_t k = i + static_cast<std::size_t>(m);
      p = bicycle_step(p, rail.speeds[k], rail.wheel_angles[k], slip_angle(rail.wheel_angles[k], vehicle),
                       kTickSeconds, vehicle);
    }
    worst = std::max(worst, planar_distance(p, rail.poses[i + kTicksPerSample]));
  }
  return worst;
}

namespace detail
{
inline EgoState ego_from_rail(const RailSample & s, const VehicleParams & vehicle)
{
  EgoState ego;
  ego.pose = s.pose;
  ego.speed = s.speed;
  ego.speed_estimate = s.speed;
  ego.steer_wheel_angle = s.wheel_angle * vehicle.steering_ratio;
  ego.slip_angle = slip_angle(s.wheel_angle, vehicle);
  return ego;
}

/// True when the last record of a closed-loop log meets its own terminal
/// condition, i.e. the log was not cut short.
inline bool rail_reaches_terminal(const RunLog & source, const ScenarioSpec & sc)
{
  const SampleRecord & last = source.records.back();
  switch (source.terminal) {
    case Terminal::Collision: return last.true_distance <= 0.0;
    case Terminal::Stopped: return last.ego.speed < sc.stop_speed_threshold;
    case Terminal::DistanceComplete:
      return sc.road->station_of(last.ego.pose.x, last.ego.pose.y) >= sc.end_arclength - 1e-3;
    case Terminal::Timeout: return last.t >= sc.max_duration - 1e-6;
  }
  return false;
}

inline DegradationParams apply_override(DegradationParams p, const DegradationOverride & o)
{
  if (o.distance_bias) p.distance_bias = *o.distance_bias;
  if (o.distance_noise_std) p.distance_noise_std = *o.distance_noise_std;
  if (o.lateral_error_std) p.lateral_error_std = *o.lateral_error_std;
  if (o.detection_range) p.detection_range = *o.detection_range;
  return p;
}
}  // namespace detail

/// Executes one experimental run at 10 ms ticks.
///
/// Per tick, in this fixed order: (1) on perception ticks (every fifth, phase
/// reset at the Following trigger) a fresh frame is computed and, while
/// collecting, the pre-step state is captured as a record; (2) the controller
/// acts on the held frame (never in MIL); (3) the ego plant advances (lagged
/// for VIL, ideal for SIL, rail for MIL); (4) the lead advances. Termination is
/// evaluated only on record ticks, so the last record is the terminal state and
/// the record count is exactly 20 T.
inline RunLog run(const RunConfig & config, RunStats * stats = nullptr)
{
  config.validate();
  const ScenarioSpec & sc = config.scenario;
  const Road & road = *sc.road;
  const VehicleParams & vehicle = config.vehicle;
  const bool mil = config.modality == Modality::MIL;

  RunLog log;
  log.config_digest = config.config_digest;
  log.modality = config.modality;
  log.driving_type = sc.driving_type;
  log.environment = config.environment;
  log.environment.lead_class = sc.lead_class;
  log.seed = config.seed;

  RunStats local_stats;
  RunStats & st = stats ? *stats : local_stats;
  st = {};

  std::optional<RailTrajectory> rail;
  if (mil) {
    rail = extract_rail(*config.rail_source, vehicle);
    if (!detail::rail_reaches_terminal(*config.rail_source, sc)) {
      throw std::runtime_error("run: rail trajectory shorter than scenario duration");
    }
  }
  // A replay keeps the clock of its source log.
  const double t0 = mil ? config.rail_source->records.front().t : 0.0;

  LaggedPlantState plant;
  plant.accel_time_constant = config.plant.accel_time_constant;
  plant.steer_time_constant = config.plant.steer_time_constant;
  plant.wheel_noise_std = config.plant.wheel_noise_std;
  plant.params = vehicle;
  plant.ego.pose = road.pose_at(0.0);
  if (mil) plant.ego = detail::ego_from_rail(rail_step(*rail, 0), vehicle);

  SpeedFilter filter;
  filter.estimate = plant.ego.speed;
  filter.variance = config.plant.filter_initial_variance;
  filter.process_noise = config.plant.filter_process_noise;
  filter.measurement_noise = config.plant.filter_measurement_noise;
  filter.validate();

  Rng plant_rng(derive_seed(config.seed, "plant", 0));
  PerceptionState perception{0.0, Rng(derive_seed(config.seed, "perception", 0))};

  LeadState lead = spawn_lead(sc);
  ControllerState ctrl = make_controller_state(sc.ego_set_speed, config.gains);
  ControlCommand cmd;
  PerceptionFrame frame;

  const bool following = sc.driving_type == DrivingType::Following;
  // Following rails begin at the source trigger.
  bool triggered = !following || mil;
  bool collecting = triggered;
  bool has_moved = false;
  std::size_t still_ticks = 0;
  std::size_t next_perception_tick = 0;
  const auto hold_ticks = static_cast<std::size_t>(std::llround(sc.stop_hold_seconds / kTickSeconds));

  for (std::size_t k = 0;; ++k) {
    EgoState & ego = plant.ego;
    const double t = t0 + static_cast<double>(k) / 100.0;
    const double d = lead_distance(ego, lead);

    if (!triggered && d <= sc.trigger_distance) {
      triggered = true;
      collecting = true;
      next_perception_tick = k;
    }

    // (1) perception
    bool new_frame = false;
    if (k == next_perception_tick) {
      const DegradationParams params = detail::apply_override(
        degradation_from_environment(log.environment, ego.pose.heading, config.perception), config.degradation);
      auto [f, s] = perceive(ego, lead, road, params, std::move(perception), kSamplePeriod);
      frame = f;
      perception = std::move(s);
      new_frame = true;
      next_perception_tick += kTicksPerSample;
      ++st.perception_frames;
    }

    // (2) control
    if (!mil) {
      auto [accel, next_ctrl] = longitudinal_command(frame, ego.speed_estimate, ctrl, config.gains, kTickSeconds, new_frame);
      ctrl = next_ctrl;
      cmd.accel_cmd = std::clamp(accel, vehicle.accel_min, vehicle.accel_max);
      const Pose & target = frame.predicted_pose_500ms;
      const double forward = std::cos(ego.pose.heading) * (target.x - ego.pose.x) +
                             std::sin(ego.pose.heading) * (target.y - ego.pose.y);
      // Below walking pace the prediction collapses onto the vehicle; hold the wheel.
      if (forward > 0.5) {
        cmd.steer_cmd = lateral_command(ego.pose, target, ego.speed_estimate, vehicle, config.gains.min_lookahead);
      }
      ++st.controller_invocations;
    }

    if (new_frame && collecting) {
      SampleRecord rec;
      rec.t = t;
      rec.ego = ego;
      rec.lead = lead;
      rec.true_distance = d;
      rec.perceived_distance = frame.perceived_distance;
      rec.predicted_pose_500ms = frame.predicted_pose_500ms;
      rec.accel_cmd = cmd.accel_cmd;
      rec.steer_cmd = cmd.steer_cmd;
      log.records.push_back(rec);
    }

    // Termination, on record ticks only.
    const bool rail_exhausted = mil && k + 1 >= rail->size();
    if (new_frame && collecting) {
      std::optional<Terminal> done;
      if (d <= 0.0) {
        done = Terminal::Collision;
      } else if (following && road.station_of(ego.pose.x, ego.pose.y) >= sc.end_arclength) {
        done = Terminal::DistanceComplete;
      } else if (rail_exhausted) {
        // The replayed lead may differ from the source's, so a source collision need not recur.
        done = config.rail_source->terminal;
        if (done == Terminal::Collision) {
          done = ego.speed < sc.stop_speed_threshold ? Terminal::Stopped : Terminal::Timeout;
        }
      } else if (!following && !mil && has_moved && still_ticks >= hold_ticks) {
        done = Terminal::Stopped;
      } else if (t >= sc.max_duration) {
        done = Terminal::Timeout;
      }
      if (done) {
        log.terminal = *done;
        st.ticks = k;
        return log;
      }
    } else if (!collecting && (d <= 0.0 || t >= sc.max_duration)) {
      log.terminal = d <= 0.0 ? Terminal::Collision : Terminal::Timeout;
      st.ticks = k;
      return log;
    }

    // (3) ego plant
    switch (config.modality) {
      case Modality::VIL: {
        auto [next_plant, next_filter] =
          lagged_plant_step(plant, filter, cmd.accel_cmd, cmd.steer_cmd, kTickSeconds, plant_rng);
        plant = next_plant;
        filter = next_filter;
        break;
      }
      case Modality::SIL:
        plant.ego = ideal_plant_step(plant.ego, cmd.accel_cmd, cmd.steer_cmd, kTickSeconds, vehicle);
        break;
      case Modality::MIL:
        if (rail_exhausted) {
          throw std::runtime_error("run: rail trajectory shorter than scenario duration");
        }
        plant.ego = detail::ego_from_rail(rail_step(*rail, k + 1), vehicle);
        break;
    }
    if (plant.ego.speed > 1.0) has_moved = true;
    still_ticks = (has_moved && plant.ego.speed < sc.stop_speed_threshold) ? still_ticks + 1 : 0;

    // (4) lead
    lead = lead_step(lead, road, triggered ? sc.lead_cruise_speed : 0.0, kTickSeconds, sc.lead_speed_gain,
                     sc.lead_accel_limit);
  }
}

}  // namespace tripleloop

#endif  // TRIPLELOOP__LOOP_HPP_
