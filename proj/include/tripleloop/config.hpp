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

#ifndef TRIPLELOOP__CONFIG_HPP_
#define TRIPLELOOP__CONFIG_HPP_

#include "tripleloop/analysis.hpp"
#include "tripleloop/control.hpp"
#include "tripleloop/core.hpp"
#include "tripleloop/loop.hpp"
#include "tripleloop/perception.hpp"
#include "tripleloop/road.hpp"
#include "tripleloop/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tripleloop
{

using Json = nlohmann::json;

/// Raised for any schema or value problem in a config file.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct ConditionSpec
{
  DrivingType driving_type{DrivingType::Stopping};
  EnvironmentPreset preset{EnvironmentPreset::NoonClear};
  LeadClass lead_class{LeadClass::BlackSedan};
  std::size_t runs{1};
};

struct SuiteSettings
{
  std::string name{"default"};
  std::uint64_t base_seed{20240501};
  std::string output_dir{"out"};
  std::size_t jobs{1};
  std::vector<Modality> modalities{Modality::VIL, Modality::SIL, Modality::MIL};
  std::vector<ConditionSpec> conditions;
  /// Condition whose VIL logs are replayed by every MIL condition.
  EnvironmentPreset rail_preset{EnvironmentPreset::Night};
  LeadClass rail_lead_class{LeadClass::BlackSedan};
};

struct FogSweepSettings
{
  double grid_start{0.05};
  double grid_step{0.01};
  std::size_t count{95};
  std::size_t expected_runs{95};
  LeadClass lead_class{LeadClass::Ambulance};
  double rain_intensity{1.0};
  /// Points whose regression-predicted minTTC falls below this are flagged.
  double flag_min_ttc{1.0};
};

struct SunSweepSettings
{
  std::vector<double> altitudes{10, 20, 30, 40, 50, 60, 70, 80, 90};
  std::vector<double> azimuths{};
  std::size_t expected_runs{333};
  LeadClass lead_class{LeadClass::BlackSedan};

  SunSweepSettings()
  {
    for (int a = 0; a <= 360; a += 10) azimuths.push_back(a);
  }
};

struct SweepSettings
{
  FogSweepSettings fog{};
  SunSweepSettings sun{};
};

struct Config
{
  VehicleParams vehicle{};
  PlantParams plant{};
  ControllerGains controller{};
  PerceptionCalibration perception{};
  ScenarioParams scenario{};
  std::vector<RoadSegment> road_segments{Straight{200.0}, Arc{400.0, -600.0 / 400.0}};
  AnalysisOptions analysis{};
  SuiteSettings suite{};
  SweepSettings sweeps{};

  std::shared_ptr<const Road> make_road() const { return std::make_shared<const Road>(road_segments); }
};

/// The experiment matrix used when the config names no conditions: every
/// lighting preset with both leads, plus NoonClear with the ambulance for Stopping.
inline std::vector<ConditionSpec> default_conditions()
{
  std::vector<ConditionSpec> out;
  const EnvironmentPreset lighting[] = {EnvironmentPreset::SunsetClear, EnvironmentPreset::RainFog,
                                        EnvironmentPreset::SunGlare, EnvironmentPreset::Night};
  for (DrivingType type : {DrivingType::Stopping, DrivingType::Following}) {
    const std::size_t runs = type == DrivingType::Stopping ? 5 : 3;
    for (EnvironmentPreset p : lighting) {
      for (LeadClass lead : {LeadClass::BlackSedan, LeadClass::Ambulance}) out.push_back({type, p, lead, runs});
    }
    if (type == DrivingType::Stopping) {
      out.push_back({type, EnvironmentPreset::NoonClear, LeadClass::Ambulance, runs});
    }
  }
  return out;
}

namespace detail
{
/// 1-based line of the first `"key":` occurrence in the source text, or 0.
inline std::size_t line_of_key(const std::string & text, const std::string & key)
{
  const std::string needle = "\"" + key + "\"";
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    std::size_t after = pos + needle.size();
    while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
    if (after < text.size() && text[after] == ':') {
      return static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n')) + 1;
    }
    pos = after;
  }
  return 0;
}

/// Strict reader over one JSON object: every key must be consumed.
class ObjectReader
{
public:
  ObjectReader(const Json & obj, std::string path, const std::string & text)
  : obj_(obj), path_(std::move(path)), text_(text)
  {
    if (!obj_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string & key) const { return obj_.contains(key); }

  template <typename T>
  void read(const std::string & key, T & out)
  {
    if (!obj_.contains(key)) return;
    seen_.insert(key);
    try {
      out = obj_.at(key).get<T>();
    } catch (const nlohmann::json::exception &) {
      fail(key, "has the wrong type");
    }
  }

  void read_positive(const std::string & key, double & out)
  {
    read(key, out);
    if (obj_.contains(key) && !(out > 0.0)) fail(key, "must be > 0");
  }

  void read_nonnegative(const std::string & key, double & out)
  {
    read(key, out);
    if (obj_.contains(key) && !(out >= 0.0)) fail(key, "must be >= 0");
  }

  ObjectReader child(const std::string & key)
  {
    seen_.insert(key);
    return ObjectReader(obj_.at(key), join(key), text_);
  }

  const Json & raw(const std::string & key)
  {
    seen_.insert(key);
    return obj_.at(key);
  }

  void finish() const
  {
    for (const auto & [key, value] : obj_.items()) {
      if (!seen_.count(key)) fail(key, "is not a recognized key");
    }
  }

  [[noreturn]] void fail(const std::string & key, const std::string & what) const
  {
    const std::size_t line = line_of_key(text_, key);
    std::ostringstream os;
    os << "config: key '" << join(key) << "' " << what;
    if (line > 0) os << " (line " << line << ")";
    throw ConfigError(os.str());
  }

private:
  std::string join(const std::string & key) const { return path_.empty() ? key : path_ + "." + key; }

  const Json & obj_;
  std::string path_;
  const std::string & text_;
  std::set<std::string> seen_;
};

template <typename Fn>
auto parse_named(ObjectReader & r, const std::string & key, const std::string & value, Fn fn)
{
  try {
    return fn(value);
  } catch (const std::invalid_argument & e) {
    r.fail(key, e.what());
  }
}

inline void read_cone(ObjectReader r, SunCone & cone)
{
  r.read("center_deg", cone.center_deg);
  r.read_positive("half_width_deg", cone.half_width_deg);
  r.read_positive("max_altitude_deg", cone.max_altitude_deg);
  r.read_positive("peak_factor", cone.peak_factor);
  r.finish();
}
}  // namespace detail

/// Parses config text; unknown keys and ill-typed values raise ConfigError
/// naming the key and its line.
inline Config parse_config(const std::string & text)
{
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error & e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }

  Config cfg;
  cfg.suite.conditions = default_conditions();
  detail::ObjectReader top(root, "", text);

  if (top.has("vehicle")) {
    auto v = top.child("vehicle");
    v.read_positive("wheelbase", cfg.vehicle.wheelbase);
    v.read_positive("steering_ratio", cfg.vehicle.steering_ratio);
    v.read_positive("mass", cfg.vehicle.mass);
    v.read("rear_axle_fraction", cfg.vehicle.rear_axle_fraction);
    if (v.has("accel_limits")) {
      std::vector<double> lim;
      v.read("accel_limits", lim);
      if (lim.size() != 2 || !(lim[0] < 0.0 && lim[1] > 0.0)) v.fail("accel_limits", "must be [min < 0, max > 0]");
      cfg.vehicle.accel_min = lim[0];
      cfg.vehicle.accel_max = lim[1];
    }
    v.read_positive("steer_limit", cfg.vehicle.steer_limit);
    v.read_positive("steer_rate_limit", cfg.vehicle.steer_rate_limit);
    if (v.has("vil_plant")) {
      auto p = v.child("vil_plant");
      p.read_nonnegative("accel_time_constant", cfg.plant.accel_time_constant);
      p.read_nonnegative("steer_time_constant", cfg.plant.steer_time_constant);
      p.read_nonnegative("wheel_noise_std", cfg.plant.wheel_noise_std);
      p.read_positive("filter_initial_variance", cfg.plant.filter_initial_variance);
      p.read_positive("filter_process_noise", cfg.plant.filter_process_noise);
      p.read_positive("filter_measurement_noise", cfg.plant.filter_measurement_noise);
      p.finish();
    }
    v.finish();
    try {
      cfg.vehicle.validate();
    } catch (const std::invalid_argument & e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }

  if (top.has("controller")) {
    auto c = top.child("controller");
    c.read_nonnegative("k_distance", cfg.controller.k_distance);
    c.read_nonnegative("k_speed", cfg.controller.k_speed);
    c.read_positive("lead_speed_time_constant", cfg.controller.lead_speed_time_constant);
    c.read_nonnegative("cruise_kp", cfg.controller.cruise_kp);
    c.read_nonnegative("cruise_ki", cfg.controller.cruise_ki);
    c.read_nonnegative("cruise_integral_band", cfg.controller.cruise_integral_band);
    c.read_positive("standoff", cfg.controller.standoff);
    c.read_positive("time_headway", cfg.controller.time_headway);
    c.read_positive("min_lookahead", cfg.controller.min_lookahead);
    c.finish();
  }
  cfg.controller.accel_min = cfg.vehicle.accel_min;
  cfg.controller.accel_max = cfg.vehicle.accel_max;

  if (top.has("perception_presets")) {
    auto pp = top.child("perception_presets");
    PerceptionCalibration & pc = cfg.perception;
    if (pp.has("model")) {
      auto m = pp.child("model");
      m.read("fog_knee", pc.fog_knee);
      m.read_nonnegative("fog_slope", pc.fog_slope);
      if (m.has("frontal_glare")) detail::read_cone(m.child("frontal_glare"), pc.frontal_glare);
      if (m.has("right_rear")) detail::read_cone(m.child("right_rear"), pc.right_rear);
      m.read_nonnegative("distance_noise_std", pc.distance_noise_std);
      m.read_nonnegative("lateral_error_std", pc.lateral_error_std);
      m.read_positive("lateral_error_timescale", pc.lateral_error_timescale);
      m.read_positive("detection_range", pc.detection_range);
      m.read_nonnegative("rain_lateral_gain", pc.rain_lateral_gain);
      m.read_positive("night_lateral_factor", pc.night_lateral_factor);
      m.read_nonnegative("glare_lateral_gain", pc.glare_lateral_gain);
      m.read_nonnegative("fog_lateral_gain", pc.fog_lateral_gain);
      m.finish();
    }
    if (pp.has("table")) {
      auto t = pp.child("table");
      for (const auto & [name, value] : pp.raw("table").items()) {
        const EnvironmentPreset preset = detail::parse_named(t, name, name, parse_preset);
        if (preset == EnvironmentPreset::Custom) t.fail(name, "Custom cannot have a table row");
        PresetEntry e = pc.presets.count(preset) ? pc.presets.at(preset) : PresetEntry{};
        auto row = t.child(name);
        row.read("fog_fraction", e.fog_fraction);
        row.read("rain_intensity", e.rain_intensity);
        row.read("sun_altitude", e.sun_altitude);
        row.read("sun_azimuth", e.sun_azimuth);
        if (row.has("sun_azimuth_following")) {
          double az = 0.0;
          row.read("sun_azimuth_following", az);
          e.sun_azimuth_following = az;
        }
        row.read("night", e.night);
        row.read_positive("bias_black_sedan", e.bias_black_sedan);
        row.read_positive("bias_ambulance", e.bias_ambulance);
        row.finish();
        pc.presets[preset] = e;
      }
      t.finish();
    }
    pp.finish();
  }

  if (top.has("scenario")) {
    auto s = top.child("scenario");
    ScenarioParams & sp = cfg.scenario;
    if (s.has("road")) {
      auto road = s.child("road");
      if (road.has("segments")) {
        const Json & segs = road.raw("segments");
        if (!segs.is_array() || segs.empty()) road.fail("segments", "must be a non-empty array");
        cfg.road_segments.clear();
        for (std::size_t i = 0; i < segs.size(); ++i) {
          detail::ObjectReader seg(segs[i], "scenario.road.segments[" + std::to_string(i) + "]", text);
          std::string type;
          seg.read("type", type);
          if (type == "straight") {
            double len = 0.0;
            seg.read_positive("length", len);
            cfg.road_segments.push_back(Straight{len});
          } else if (type == "arc") {
            double radius = 0.0, angle_deg = 0.0;
            seg.read_positive("radius", radius);
            seg.read("angle_deg", angle_deg);
            if (angle_deg == 0.0) seg.fail("angle_deg", "must be non-zero");
            cfg.road_segments.push_back(Arc{radius, deg_to_rad(angle_deg)});
          } else {
            seg.fail("type", "must be \"straight\" or \"arc\"");
          }
          seg.finish();
        }
      }
      road.finish();
    }
    if (s.has("stopping")) {
      auto st = s.child("stopping");
      st.read_positive("lead_arclength", sp.stopping_lead_arclength);
      double mph = -1.0;
      st.read("set_speed_mph", mph);
      if (st.has("set_speed_mph")) sp.stopping_set_speed = mph_to_mps(mph);
      st.read_positive("max_duration", sp.stopping_max_duration);
      st.read_positive("stop_speed_threshold", sp.stop_speed_threshold);
      st.read_positive("stop_hold_seconds", sp.stop_hold_seconds);
      st.finish();
    }
    if (s.has("following")) {
      auto f = s.child("following");
      f.read_positive("lead_arclength", sp.following_lead_arclength);
      double mph = -1.0;
      f.read("set_speed_mph", mph);
      if (f.has("set_speed_mph")) sp.following_set_speed = mph_to_mps(mph);
      mph = -1.0;
      f.read("lead_cruise_mph", mph);
      if (f.has("lead_cruise_mph")) sp.following_lead_cruise = mph_to_mps(mph);
      f.read_positive("trigger_distance", sp.following_trigger_distance);
      f.read_positive("end_arclength", sp.following_end_arclength);
      f.read_positive("max_duration", sp.following_max_duration);
      f.finish();
    }
    if (s.has("lead")) {
      auto l = s.child("lead");
      l.read_positive("speed_gain", sp.lead_speed_gain);
      l.read_positive("accel_limit", sp.lead_accel_limit);
      l.finish();
    }
    if (s.has("analysis")) {
      auto a = s.child("analysis");
      a.read_nonnegative("stopping_dr_window", cfg.analysis.stopping_dr_window);
      a.read_nonnegative("following_dr_window", cfg.analysis.following_dr_window);
      a.read_nonnegative("ttc_min_speed", cfg.analysis.ttc_min_speed);
      a.finish();
    }
    s.finish();
  }

  if (top.has("suite")) {
    auto s = top.child("suite");
    SuiteSettings & ss = cfg.suite;
    s.read("name", ss.name);
    s.read("base_seed", ss.base_seed);
    s.read("output_dir", ss.output_dir);
    s.read("jobs", ss.jobs);
    if (ss.jobs == 0) s.fail("jobs", "must be >= 1");
    if (s.has("modalities")) {
      std::vector<std::string> names;
      s.read("modalities", names);
      ss.modalities.clear();
      for (const auto & n : names) ss.modalities.push_back(detail::parse_named(s, "modalities", n, parse_modality));
    }
    if (s.has("conditions")) {
      const Json & arr = s.raw("conditions");
      if (!arr.is_array() || arr.empty()) s.fail("conditions", "must be a non-empty array");
      ss.conditions.clear();
      std::set<std::string> ids;
      for (std::size_t i = 0; i < arr.size(); ++i) {
        detail::ObjectReader c(arr[i], "suite.conditions[" + std::to_string(i) + "]", text);
        std::string type, preset, lead;
        ConditionSpec cs;
        c.read("driving_type", type);
        c.read("preset", preset);
        c.read("lead_class", lead);
        c.read("runs", cs.runs);
        cs.driving_type = detail::parse_named(c, "driving_type", type, parse_driving_type);
        cs.preset = detail::parse_named(c, "preset", preset, parse_preset);
        cs.lead_class = detail::parse_named(c, "lead_class", lead, parse_lead_class);
        if (cs.preset == EnvironmentPreset::Custom) c.fail("preset", "suite conditions need a named preset");
        if (cs.runs < 1) c.fail("runs", "must be >= 1");
        c.finish();
        const std::string id = type + "/" + preset + "/" + lead;
        if (!ids.insert(id).second) c.fail("preset", "duplicates condition " + id);
        ss.conditions.push_back(cs);
      }
    }
    if (s.has("mil_rail_source")) {
      auto r = s.child("mil_rail_source");
      std::string preset = std::string(to_string(ss.rail_preset));
      std::string lead = std::string(to_string(ss.rail_lead_class));
      r.read("preset", preset);
      r.read("lead_class", lead);
      ss.rail_preset = detail::parse_named(r, "preset", preset, parse_preset);
      ss.rail_lead_class = detail::parse_named(r, "lead_class", lead, parse_lead_class);
      r.finish();
    }
    s.finish();
  }

  if (top.has("sweeps")) {
    auto s = top.child("sweeps");
    if (s.has("fog")) {
      auto f = s.child("fog");
      FogSweepSettings & fs = cfg.sweeps.fog;
      f.read("grid_start", fs.grid_start);
      f.read_positive("grid_step", fs.grid_step);
      f.read("count", fs.count);
      f.read("expected_runs", fs.expected_runs);
      f.read("rain_intensity", fs.rain_intensity);
      f.read_nonnegative("flag_min_ttc", fs.flag_min_ttc);
      std::string lead = std::string(to_string(fs.lead_class));
      f.read("lead_class", lead);
      fs.lead_class = detail::parse_named(f, "lead_class", lead, parse_lead_class);
      if (fs.count == 0) f.fail("count", "must be >= 1");
      const double last = fs.grid_start + fs.grid_step * static_cast<double>(fs.count - 1);
      if (fs.grid_start < 0.05 - 1e-12 || last > 1.0 + 1e-12) f.fail("grid_start", "fog grid must lie within [0.05, 1.00]");
      f.finish();
    }
    if (s.has("sun")) {
      auto u = s.child("sun");
      SunSweepSettings & us = cfg.sweeps.sun;
      u.read("altitudes", us.altitudes);
      u.read("azimuths", us.azimuths);
      u.read("expected_runs", us.expected_runs);
      std::string lead = std::string(to_string(us.lead_class));
      u.read("lead_class", lead);
      us.lead_class = detail::parse_named(u, "lead_class", lead, parse_lead_class);
      if (us.altitudes.empty() || us.azimuths.empty()) u.fail("altitudes", "sun grid must be non-empty");
      for (double a : us.altitudes) {
        if (a < 0.0 || a > 90.0) u.fail("altitudes", "altitudes must lie within [0, 90]");
      }
      for (double a : us.azimuths) {
        if (a < 0.0 || a > 360.0) u.fail("azimuths", "azimuths must lie within [0, 360]");
      }
      u.finish();
    }
    s.finish();
  }

  top.finish();
  try {
    (void)cfg.make_road();
  } catch (const std::invalid_argument & e) {
    throw ConfigError(std::string("config: scenario.road: ") + e.what());
  }
  return cfg;
}

inline Config load_config(const std::string & path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Canonical JSON form of a config; the digest of this text identifies the run setup.
inline Json config_to_json(const Config & cfg)
{
  Json j;
  const auto & v = cfg.vehicle;
  j["vehicle"] = {{"wheelbase", v.wheelbase},
                  {"steering_ratio", v.steering_ratio},
                  {"mass", v.mass},
                  {"rear_axle_fraction", v.rear_axle_fraction},
                  {"accel_limits", {v.accel_min, v.accel_max}},
                  {"steer_limit", v.steer_limit},
                  {"steer_rate_limit", v.steer_rate_limit},
                  {"vil_plant",
                   {{"accel_time_constant", cfg.plant.accel_time_constant},
                    {"steer_time_constant", cfg.plant.steer_time_constant},
                    {"wheel_noise_std", cfg.plant.wheel_noise_std},
                    {"filter_initial_variance", cfg.plant.filter_initial_variance},
                    {"filter_process_noise", cfg.plant.filter_process_noise},
                    {"filter_measurement_noise", cfg.plant.filter_measurement_noise}}}};
  const auto & c = cfg.controller;
  j["controller"] = {{"k_distance", c.k_distance},
                     {"k_speed", c.k_speed},
                     {"lead_speed_time_constant", c.lead_speed_time_constant},
                     {"cruise_kp", c.cruise_kp},
                     {"cruise_ki", c.cruise_ki},
                     {"cruise_integral_band", c.cruise_integral_band},
                     {"standoff", c.standoff},
                     {"time_headway", c.time_headway},
                     {"min_lookahead", c.min_lookahead}};
  const auto & p = cfg.perception;
  const auto cone = [](const SunCone & s) {
    return Json{{"center_deg", s.center_deg},
                {"half_width_deg", s.half_width_deg},
                {"max_altitude_deg", s.max_altitude_deg},
                {"peak_factor", s.peak_factor}};
  };
  Json table = Json::object();
  for (const auto & [preset, e] : p.presets) {
    Json row = {{"fog_fraction", e.fog_fraction},
                {"rain_intensity", e.rain_intensity},
                {"sun_altitude", e.sun_altitude},
                {"sun_azimuth", e.sun_azimuth},
                {"night", e.night},
                {"bias_black_sedan", e.bias_black_sedan},
                {"bias_ambulance", e.bias_ambulance}};
    if (e.sun_azimuth_following) row["sun_azimuth_following"] = *e.sun_azimuth_following;
    table[std::string(to_string(preset))] = row;
  }
  j["perception_presets"] = {{"model",
                              {{"fog_knee", p.fog_knee},
                               {"fog_slope", p.fog_slope},
                               {"frontal_glare", cone(p.frontal_glare)},
                               {"right_rear", cone(p.right_rear)},
                               {"distance_noise_std", p.distance_noise_std},
                               {"lateral_error_std", p.lateral_error_std},
                               {"lateral_error_timescale", p.lateral_error_timescale},
                               {"detection_range", p.detection_range},
                               {"rain_lateral_gain", p.rain_lateral_gain},
                               {"night_lateral_factor", p.night_lateral_factor},
                               {"glare_lateral_gain", p.glare_lateral_gain},
                               {"fog_lateral_gain", p.fog_lateral_gain}}},
                             {"table", table}};
  Json segs = Json::array();
  for (const auto & seg : cfg.road_segments) {
    if (const auto * s = std::get_if<Straight>(&seg)) {
      segs.push_back({{"type", "straight"}, {"length", s->length}});
    } else {
      const auto & a = std::get<Arc>(seg);
      segs.push_back({{"type", "arc"}, {"radius", a.radius}, {"angle_deg", rad_to_deg(a.angle)}});
    }
  }
  const auto & s = cfg.scenario;
  j["scenario"] = {
    {"road", {{"segments", segs}}},
    {"stopping",
     {{"lead_arclength", s.stopping_lead_arclength},
      {"set_speed_mph", s.stopping_set_speed / kMphToMps},
      {"max_duration", s.stopping_max_duration},
      {"stop_speed_threshold", s.stop_speed_threshold},
      {"stop_hold_seconds", s.stop_hold_seconds}}},
    {"following",
     {{"lead_arclength", s.following_lead_arclength},
      {"set_speed_mph", s.following_set_speed / kMphToMps},
      {"lead_cruise_mph", s.following_lead_cruise / kMphToMps},
      {"trigger_distance", s.following_trigger_distance},
      {"end_arclength", s.following_end_arclength},
      {"max_duration", s.following_max_duration}}},
    {"lead", {{"speed_gain", s.lead_speed_gain}, {"accel_limit", s.lead_accel_limit}}},
    {"analysis",
     {{"stopping_dr_window", cfg.analysis.stopping_dr_window},
      {"following_dr_window", cfg.analysis.following_dr_window},
      {"ttc_min_speed", cfg.analysis.ttc_min_speed}}}};
  Json conds = Json::array();
  for (const auto & cs : cfg.suite.conditions) {
    conds.push_back({{"driving_type", to_string(cs.driving_type)},
                     {"preset", to_string(cs.preset)},
                     {"lead_class", to_string(cs.lead_class)},
                     {"runs", cs.runs}});
  }
  Json mods = Json::array();
  for (Modality m : cfg.suite.modalities) mods.push_back(to_string(m));
  j["suite"] = {{"name", cfg.suite.name},
                {"base_seed", cfg.suite.base_seed},
                {"output_dir", cfg.suite.output_dir},
                {"jobs", cfg.suite.jobs},
                {"modalities", mods},
                {"conditions", conds},
                {"mil_rail_source",
                 {{"preset", to_string(cfg.suite.rail_preset)}, {"lead_class", to_string(cfg.suite.rail_lead_class)}}}};
  const auto & f = cfg.sweeps.fog;
  const auto & u = cfg.sweeps.sun;
  j["sweeps"] = {{"fog",
                  {{"grid_start", f.grid_start},
                   {"grid_step", f.grid_step},
                   {"count", f.count},
                   {"expected_runs", f.expected_runs},
                   {"rain_intensity", f.rain_intensity},
                   {"flag_min_ttc", f.flag_min_ttc},
                   {"lead_class", to_string(f.lead_class)}}},
                 {"sun",
                  {{"altitudes", u.altitudes},
                   {"azimuths", u.azimuths},
                   {"expected_runs", u.expected_runs},
                   {"lead_class", to_string(u.lead_class)}}}};
  return j;
}

/// Hex digest of the parts of a config that influence simulated runs.
inline std::string config_digest(const Config & cfg)
{
  Json j = config_to_json(cfg);
  j.erase("suite");
  j.erase("sweeps");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

}  // namespace tripleloop

#endif  // TRIPLELOOP__CONFIG_HPP_
