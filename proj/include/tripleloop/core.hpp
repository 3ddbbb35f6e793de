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

#ifndef TRIPLELOOP__CORE_HPP_
#define TRIPLELOOP__CORE_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tripleloop
{

inline constexpr double kPi = std::numbers::pi;

/// Fixed dynamics step [s].
inline constexpr double kTickSeconds = 0.010;
/// Perception / logging period expressed in dynamics ticks (20 Hz).
inline constexpr int kTicksPerSample = 5;
inline constexpr double kSamplePeriod = kTickSeconds * kTicksPerSample;

inline constexpr double kMphToMps = 0.44704;

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double theta)
{
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("normalize_angle: non-finite angle");
  }
  double wrapped = std::remainder(theta, 2.0 * kPi);  // [-pi, pi]
  if (wrapped <= -kPi) {
    wrapped += 2.0 * kPi;
  }
  return wrapped;
}

inline double mph_to_mps(double mph)
{
  if (!(mph >= 0.0)) {
    throw std::invalid_argument("mph_to_mps: speed must be non-negative");
  }
  return mph * kMphToMps;
}

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct Pose
{
  double x{0.0};        // world frame [m]
  double y{0.0};        // world frame [m]
  double heading{0.0};  // CCW from +x [rad], kept in (-pi, pi]

  friend bool operator==(const Pose &, const Pose &) = default;
};

inline double planar_distance(const Pose & a, const Pose & b)
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct EgoState
{
  Pose pose{};
  double speed{0.0};              // true speed [m/s]
  double speed_estimate{0.0};     // Kalman output [m/s]
  double steer_wheel_angle{0.0};  // steering-wheel frame [rad]
  double accel_actual{0.0};       // [m/s^2]
  double slip_angle{0.0};         // [rad]
};

struct LeadState
{
  Pose pose{};
  double speed{0.0};
  double rear_offset{2.39};  // center to rear bumper [m]
  double station{0.0};       // arc length along the lane centerline [m]
};

struct VehicleParams
{
  double wheelbase{2.69};
  double steering_ratio{14.3};
  double mass{1530.0};
  double rear_axle_fraction{0.5};  // l_r / L, used for the slip angle
  double accel_min{-3.5};
  double accel_max{2.0};
  double steer_limit{7.5};       // steering-wheel angle [rad]
  double steer_rate_limit{5.0};  // steering-wheel rate [rad/s]

  void validate() const
  {
    if (!(wheelbase > 0.0)) throw std::invalid_argument("vehicle.wheelbase must be > 0");
    if (!(steering_ratio > 0.0)) throw std::invalid_argument("vehicle.steering_ratio must be > 0");
    if (!(accel_min < 0.0 && accel_max > 0.0)) {
      throw std::invalid_argument("vehicle accel limits must satisfy min < 0 < max");
    }
    if (!(rear_axle_fraction >= 0.0 && rear_axle_fraction <= 1.0)) {
      throw std::invalid_argument("vehicle.rear_axle_fraction must lie in [0, 1]");
    }
    if (!(steer_limit > 0.0) || !(steer_rate_limit > 0.0)) {
      throw std::invalid_argument("vehicle steering limits must be > 0");
    }
  }
};

enum class EnvironmentPreset { SunsetClear, RainFog, SunGlare, Night, NoonClear, Custom };
enum class LeadClass { BlackSedan, Ambulance };
enum class Modality { VIL, SIL, MIL };
enum class DrivingType { Stopping, Following };
enum class Terminal { Stopped, Collision, DistanceComplete, Timeout };

struct Environment
{
  EnvironmentPreset preset{EnvironmentPreset::NoonClear};
  double fog_fraction{0.0};
  double rain_intensity{0.0};
  double sun_altitude{80.0};   // [deg]
  double sun_azimuth{180.0};   // [deg], compass-style (clockwise), 180 = along the road start
  bool night{false};
  LeadClass lead_class{LeadClass::BlackSedan};

  void validate() const
  {
    auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
    if (!in(fog_fraction, 0.0, 1.0)) throw std::invalid_argument("environment.fog_fraction outside [0, 1]");
    if (!in(rain_intensity, 0.0, 1.0)) throw std::invalid_argument("environment.rain_intensity outside [0, 1]");
    if (!in(sun_altitude, 0.0, 90.0)) throw std::invalid_argument("environment.sun_altitude outside [0, 90]");
    if (!(sun_azimuth >= 0.0 && sun_azimuth <= 360.0)) {
      throw std::invalid_argument("environment.sun_azimuth outside [0, 360]");
    }
  }
};

/// Rear-bumper offsets of the two lead vehicles.
inline double rear_offset_for(LeadClass lead)
{
  return lead == LeadClass::BlackSedan ? 2.39 : 3.17;
}

/// Ego center to lead rear bumper. Non-positive only at (or past) contact.
inline double lead_distance(const EgoState & ego, const LeadState & lead)
{
  return planar_distance(ego.pose, lead.pose) - lead.rear_offset;
}

struct SampleRecord
{
  double t{0.0};
  EgoState ego{};
  LeadState lead{};
  double true_distance{0.0};
  std::optional<double> perceived_distance{};
  Pose predicted_pose_500ms{};
  double accel_cmd{0.0};
  double steer_cmd{0.0};
};

struct RunLog
{
  std::string config_digest;
  Modality modality{Modality::VIL};
  DrivingType driving_type{DrivingType::Stopping};
  Environment environment{};
  std::uint64_t seed{0};
  std::vector<SampleRecord> records;
  Terminal terminal{Terminal::Timeout};

  /// Run duration T implied by the 20 Hz record count.
  double duration() const { return static_cast<double>(records.size()) * kSamplePeriod; }
};

// --- enum <-> text -------------------------------------------------------

inline std::string_view to_string(EnvironmentPreset p)
{
  switch (p) {
    case EnvironmentPreset::SunsetClear: return "SunsetClear";
    case EnvironmentPreset::RainFog: return "RainFog";
    case EnvironmentPreset::SunGlare: return "SunGlare";
    case EnvironmentPreset::Night: return "Night";
    case EnvironmentPreset::NoonClear: return "NoonClear";
    case EnvironmentPreset::Custom: return "Custom";
  }
  return "?";
}

inline std::string_view to_string(LeadClass c)
{
  return c == LeadClass::BlackSedan ? "BlackSedan" : "Ambulance";
}

inline std::string_view to_string(Modality m)
{
  switch (m) {
    case Modality::VIL: return "VIL";
    case Modality::SIL: return "SIL";
    case Modality::MIL: return "MIL";
  }
  return "?";
}

inline std::string_view to_string(DrivingType d)
{
  return d == DrivingType::Stopping ? "Stopping" : "Following";
}

inline std::string_view to_string(Terminal t)
{
  switch (t) {
    case Terminal::Stopped: return "Stopped";
    case Terminal::Collision: return "Collision";
    case Terminal::DistanceComplete: return "DistanceComplete";
    case Terminal::Timeout: return "Timeout";
  }
  return "?";
}

namespace detail
{
template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::pair<std::string_view, Enum> (&table)[N], const char * what)
{
  for (const auto & [name, value] : table) {
    if (name == text) return value;
  }
  throw std::invalid_argument(std::string("unknown ") + what + " '" + std::string(text) + "'");
}
}  // namespace detail

inline EnvironmentPreset parse_preset(std::string_view s)
{
  static constexpr std::pair<std::string_view, EnvironmentPreset> table[] = {
    {"SunsetClear", EnvironmentPreset::SunsetClear}, {"RainFog", EnvironmentPreset::RainFog},
    {"SunGlare", EnvironmentPreset::SunGlare},       {"Night", EnvironmentPreset::Night},
    {"NoonClear", EnvironmentPreset::NoonClear},     {"Custom", EnvironmentPreset::Custom}};
  return detail::parse_enum(s, table, "environment preset");
}

inline LeadClass parse_lead_class(std::string_view s)
{
  static constexpr std::pair<std::string_view, LeadClass> table[] = {
    {"BlackSedan", LeadClass::BlackSedan}, {"Ambulance", LeadClass::Ambulance}};
  return detail::parse_enum(s, table, "lead class");
}

inline Modality parse_modality(std::string_view s)
{
  static constexpr std::pair<std::string_view, Modality> table[] = {
    {"VIL", Modality::VIL}, {"SIL", Modality::SIL}, {"MIL", Modality::MIL}};
  return detail::parse_enum(s, table, "modality");
}

inline DrivingType parse_driving_type(std::string_view s)
{
  static constexpr std::pair<std::string_view, DrivingType> table[] = {
    {"Stopping", DrivingType::Stopping}, {"Following", DrivingType::Following}};
  return detail::parse_enum(s, table, "driving type");
}

inline Terminal parse_terminal(std::string_view s)
{
  static constexpr std::pair<std::string_view, Terminal> table[] = {
    {"Stopped", Terminal::Stopped},
    {"Collision", Terminal::Collision},
    {"DistanceComplete", Terminal::DistanceComplete},
    {"Timeout", Terminal::Timeout}};
  return detail::parse_enum(s, table, "terminal status");
}

}  // namespace tripleloop

#endif  // TRIPLELOOP__CORE_HPP_
