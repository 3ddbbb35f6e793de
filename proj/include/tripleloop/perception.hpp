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

#ifndef TRIPLELOOP__PERCEPTION_HPP_
#define TRIPLELOOP__PERCEPTION_HPP_

#include "tripleloop/core.hpp"
#include "tripleloop/random.hpp"
#include "tripleloop/road.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>

namespace tripleloop
{

struct PerceptionFrame
{
  std::optional<double> perceived_distance{};
  Pose predicted_pose_500ms{};
  bool detection{false};
};

struct DegradationParams
{
  double distance_bias{1.0};
  double distance_noise_std{0.0};
  double lateral_error_std{0.0};
  double lateral_error_timescale{2.0};
  double detection_range{120.0};

  void validate() const
  {
    if (!(distance_bias > 0.0)) throw std::invalid_argument("distance_bias must be > 0");
    if (!(distance_noise_std >= 0.0) || !(lateral_error_std >= 0.0)) {
      throw std::invalid_argument("perception noise levels must be >= 0");
    }
    if (!(lateral_error_timescale > 0.0)) throw std::invalid_argument("lateral_error_timescale must be > 0");
    if (!(detection_range > 0.0)) throw std::invalid_argument("detection_range must be > 0");
  }
};

/// One row of the preset table: the environment a preset stands for and the
/// lead-distance bias it induces for each lead class.
struct PresetEntry
{
  double fog_fraction{0.0};
  double rain_intensity{0.0};
  double sun_altitude{80.0};
  double sun_azimuth{180.0};
  std::optional<double> sun_azimuth_following{};
  bool night{false};
  double bias_black_sedan{1.0};
  double bias_ambulance{1.0};
};

/// Angular cone around a sun direction relative to the vehicle heading.
struct SunCone
{
  double center_deg{0.0};      // relative azimuth, CCW positive (right side negative)
  double half_width_deg{20.0};
  double max_altitude_deg{25.0};
  double peak_factor{1.0};
};

/// Calibration of the synthetic perception model. None of these numbers are
/// measurements; they are knobs, all exposed through the config file.
struct PerceptionCalibration
{
  std::map<EnvironmentPreset, PresetEntry> presets{
    {EnvironmentPreset::SunsetClear, {0.0, 0.0, 5.0, 90.0, std::nullopt, false, 1.18, 1.10}},
    {EnvironmentPreset::RainFog, {0.15, 1.0, 45.0, 90.0, std::nullopt, false, 1.12, 1.08}},
    {EnvironmentPreset::SunGlare, {0.0, 0.0, 10.0, 180.0, 270.0, false, 1.02, 0.96}},
    {EnvironmentPreset::Night, {0.0, 0.0, 0.0, 0.0, std::nullopt, true, 1.30, 1.15}},
    {EnvironmentPreset::NoonClear, {0.0, 0.0, 80.0, 180.0, std::nullopt, false, 1.05, 1.00}},
  };
  double fog_knee{0.40};
  double fog_slope{1.0};
  SunCone frontal_glare{0.0, 20.0, 25.0, 0.85};
  SunCone right_rear{-135.0, 30.0, 60.0, 1.20};
  double distance_noise_std{0.01};
  double lateral_error_std{0.10};
  double lateral_error_timescale{2.0};
  double detection_range{120.0};
  double rain_lateral_gain{1.5};
  double night_lateral_factor{1.8};
  double glare_lateral_gain{0.8};
  double fog_lateral_gain{1.0};

  const PresetEntry & entry(EnvironmentPreset p) const
  {
    const auto it = presets.find(p);
    if (it == presets.end()) {
      throw std::invalid_argument("no preset table row for " + std::string(to_string(p)));
    }
    return it->second;
  }
};

/// Environment for a named preset, per the calibration table.
inline Environment make_environment(
  EnvironmentPreset preset, LeadClass lead, DrivingType driving, const PerceptionCalibration & calib)
{
  if (preset == EnvironmentPreset::Custom) {
    throw std::invalid_argument("make_environment: Custom has no table row");
  }
  const PresetEntry & e = calib.entry(preset);
  Environment env;
  env.preset = preset;
  env.fog_fraction = e.fog_fraction;
  env.rain_intensity = e.rain_intensity;
  env.sun_altitude = e.sun_altitude;
  env.sun_azimuth =
    (driving == DrivingType::Following && e.sun_azimuth_following) ? *e.sun_azimuth_following : e.sun_azimuth;
  env.night = e.night;
  env.lead_class = lead;
  return env;
}

/// Fog multiplier: flat below the knee, linear above it.
inline double fog_factor(double fog_fraction, const PerceptionCalibration & calib)
{
  if (fog_fraction < calib.fog_knee) return 1.0;
  return 1.0 + calib.fog_slope * (fog_fraction - calib.fog_knee);
}

/// Sun azimuth relative to the vehicle heading in degrees, in (-180, 180].
/// Azimuth is compass-style: 180 deg points along +x, 270 deg along -y.
inline double relative_sun_azimuth_deg(double sun_azimuth_deg, double heading)
{
  const double sun_world = deg_to_rad(180.0 - sun_azimuth_deg);
  return rad_to_deg(normalize_angle(sun_world - heading));
}

namespace detail
{
// Raised-cosine taper: 1 at the center, 0 at and beyond the half width.
inline double taper(double offset, double half_width)
{
  const double u = std::abs(offset) / half_width;
  if (u >= 1.0) return 0.0;
  const double c = std::cos(0.5 * kPi * u);
  return c * c;
}

inline double cone_weight(const SunCone & cone, double rel_az_deg, double altitude_deg)
{
  const double off = rad_to_deg(normalize_angle(deg_to_rad(rel_az_deg - cone.center_deg)));
  return taper(off, cone.half_width_deg) * taper(altitude_deg, cone.max_altitude_deg);
}
}  // namespace detail

/// Sun multiplier: below one in the frontal glare cone, above one in the
/// right-rear cone, exactly one elsewhere and at night.
inline double sun_factor(double rel_az_deg, double altitude_deg, bool night, const PerceptionCalibration & calib)
{
  if (night) return 1.0;
  const double front = detail::cone_weight(calib.frontal_glare, rel_az_deg, altitude_deg);
  const double rear = detail::cone_weight(calib.right_rear, rel_az_deg, altitude_deg);
  return 1.0 + (calib.frontal_glare.peak_factor - 1.0) * front + (calib.right_rear.peak_factor - 1.0) * rear;
}

/// Preset row that supplies the base bias; Custom environments are mapped
/// onto the closest lighting row.
inline EnvironmentPreset lighting_row(const Environment & env)
{
  if (env.preset != EnvironmentPreset::Custom) return env.preset;
  if (env.night) return EnvironmentPreset::Night;
  if (env.rain_intensity >= 0.5) return EnvironmentPreset::RainFog;
  return EnvironmentPreset::NoonClear;
}

inline DegradationParams degradation_from_environment(
  const Environment & env, double ego_heading, const PerceptionCalibration & calib = {})
{
  const PresetEntry & row = calib.entry(lighting_row(env));
  const double base = env.lead_class == LeadClass::BlackSedan ? row.bias_black_sedan : row.bias_ambulance;
  const double rel = relative_sun_azimuth_deg(env.sun_azimuth, ego_heading);

  DegradationParams out;
  out.distance_bias = base * fog_factor(env.fog_fraction, calib) * sun_factor(rel, env.sun_altitude, env.night, calib);
  out.distance_noise_std = calib.distance_noise_std;
  out.detection_range = calib.detection_range;
  out.lateral_error_timescale = calib.lateral_error_timescale;

  double lateral = calib.lateral_error_std * (1.0 + calib.rain_lateral_gain * env.rain_intensity);
  if (env.night) {
    lateral *= calib.night_lateral_factor;
  } else {
    lateral *= 1.0 + calib.glare_lateral_gain * detail::cone_weight(calib.frontal_glare, rel, env.sun_altitude);
  }
  lateral *= 1.0 + calib.fog_lateral_gain * std::max(0.0, env.fog_fraction - calib.fog_knee);
  out.lateral_error_std = lateral;
  return out;
}

struct PerceptionState
{
  double lateral_error{0.0};
  Rng rng{};
};

inline constexpr double kPredictionHorizon = 0.5;

/// One perception frame: biased, noisy lead range and the 500 ms-ahead lane
/// point displaced by the mean-reverting lateral error.
inline std::pair<PerceptionFrame, PerceptionState> perceive(
  const EgoState & ego, const LeadState & lead, const Road & road, const DegradationParams & params,
  PerceptionState state, double dt)
{
  if (!(dt > 0.0)) throw std::invalid_argument("perceive: dt must be > 0");

  // Both deviates are drawn every frame so the stream does not depend on detection.
  const double eps = state.rng.normal(params.distance_noise_std);
  const double rho = std::exp(-dt / params.lateral_error_timescale);
  state.lateral_error =
    rho * state.lateral_error + params.lateral_error_std * std::sqrt(1.0 - rho * rho) * state.rng.normal();

  PerceptionFrame frame;
  const double d = lead_distance(ego, lead);
  if (d <= params.detection_range) {
    frame.detection = true;
    frame.perceived_distance = std::max(params.distance_bias * d * (1.0 + eps), 1e-3);
  }

  const double s = road.station_of(ego.pose.x, ego.pose.y);
  const Pose lane = road.pose_at(s + ego.speed * kPredictionHorizon);
  frame.predicted_pose_500ms = {
    lane.x - state.lateral_error * std::sin(lane.heading),
    lane.y + state.lateral_error * std::cos(lane.heading),
    lane.heading};
  return {frame, std::move(state)};
}

}  // namespace tripleloop

#endif  // TRIPLELOOP__PERCEPTION_HPP_
