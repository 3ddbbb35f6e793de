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

#ifndef TRIPLELOOP__LOG_IO_HPP_
#define TRIPLELOOP__LOG_IO_HPP_

#include "tripleloop/core.hpp"
#include "tripleloop/road.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tripleloop
{

inline constexpr std::array<const char *, 16> kLogColumns = {
  "t",     "ego_x", "ego_y", "ego_heading", "ego_v",      "ego_v_est",  "steer_wheel_angle", "lead_x",
  "lead_y", "lead_v", "d",     "d_hat",       "pred_x_500", "pred_y_500", "accel_cmd",         "steer_cmd"};

/// Nine significant digits, the precision of every stored number.
inline std::string format_number(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline double quantize(double v) { return std::strtod(format_number(v).c_str(), nullptr); }

inline void write_log_csv(std::ostream & os, const RunLog & log)
{
  for (std::size_t i = 0; i < kLogColumns.size(); ++i) os << (i ? "," : "") << kLogColumns[i];
  os << '\n';
  for (const auto & r : log.records) {
    const double row[] = {r.t,
                          r.ego.pose.x,
                          r.ego.pose.y,
                          r.ego.pose.heading,
                          r.ego.speed,
                          r.ego.speed_estimate,
                          r.ego.steer_wheel_angle,
                          r.lead.pose.x,
                          r.lead.pose.y,
                          r.lead.speed,
                          r.true_distance};
    for (std::size_t i = 0; i < std::size(row); ++i) os << (i ? "," : "") << format_number(row[i]);
    // Missed detections leave d_hat empty.
    os << ',' << (r.perceived_distance ? format_number(*r.perceived_distance) : "");
    os << ',' << format_number(r.predicted_pose_500ms.x) << ',' << format_number(r.predicted_pose_500ms.y) << ','
       << format_number(r.accel_cmd) << ',' << format_number(r.steer_cmd) << '\n';
  }
}

/// Parses the CSV body into records. Fields the format does not carry
/// (lead heading, prediction heading, plant internals) are left at zero.
inline std::vector<SampleRecord> read_log_csv(std::istream & is, double lead_rear_offset)
{
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("log csv: missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::string expected;
  for (std::size_t i = 0; i < kLogColumns.size(); ++i) expected += std::string(i ? "," : "") + kLogColumns[i];
  if (line != expected) throw std::runtime_error("log csv: unexpected header '" + line + "'");

  std::vector<SampleRecord> out;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (cells.size() != kLogColumns.size()) {
      throw std::runtime_error("log csv: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                               " fields");
    }
    const auto num = [&](std::size_t i) {
      char * end = nullptr;
      const double v = std::strtod(cells[i].c_str(), &end);
      if (cells[i].empty() || *end != '\0') {
        throw std::runtime_error("log csv: line " + std::to_string(line_no) + " column " + kLogColumns[i] +
                                 " is not a number");
      }
      return v;
    };
    SampleRecord r;
    r.t = num(0);
    r.ego.pose = {num(1), num(2), num(3)};
    r.ego.speed = num(4);
    r.ego.speed_estimate = num(5);
    r.ego.steer_wheel_angle = num(6);
    r.lead.pose = {num(7), num(8), 0.0};
    r.lead.speed = num(9);
    r.lead.rear_offset = lead_rear_offset;
    r.true_distance = num(10);
    if (!cells[11].empty()) r.perceived_distance = num(11);
    r.predicted_pose_500ms = {num(12), num(13), 0.0};
    r.accel_cmd = num(14);
    r.steer_cmd = num(15);
    out.push_back(r);
  }
  return out;
}

/// Run-level facts that do not fit the per-sample CSV.
struct RunMeta
{
  std::string run_id;
  std::string condition;
  std::size_t run_index{0};
  std::vector<RoadSegment> road;
};

inline nlohmann::json road_to_json(const std::vector<RoadSegment> & segments)
{
  nlohmann::json segs = nlohmann::json::array();
  for (const auto & seg : segments) {
    if (const auto * s = std::get_if<Straight>(&seg)) {
      segs.push_back({{"type", "straight"}, {"length", s->length}});
    } else {
      const auto & a = std::get<Arc>(seg);
      segs.push_back({{"type", "arc"}, {"radius", a.radius}, {"angle", a.angle}});
    }
  }
  return segs;
}

inline std::vector<RoadSegment> road_from_json(const nlohmann::json & j)
{
  std::vector<RoadSegment> out;
  for (const auto & s : j) {
    const std::string type = s.at("type").get<std::string>();
    if (type == "straight") {
      out.push_back(Straight{s.at("length").get<double>()});
    } else if (type == "arc") {
      out.push_back(Arc{s.at("radius").get<double>(), s.at("angle").get<double>()});
    } else {
      throw std::runtime_error("run meta: unknown segment type " + type);
    }
  }
  return out;
}

inline nlohmann::json make_meta_json(const RunLog & log, const RunMeta & meta)
{
  const Environment & e = log.environment;
  return {{"run_id", meta.run_id},
          {"condition", meta.condition},
          {"run_index", meta.run_index},
          {"modality", to_string(log.modality)},
          {"driving_type", to_string(log.driving_type)},
          {"environment",
           {{"preset", to_string(e.preset)},
            {"fog_fraction", e.fog_fraction},
            {"rain_intensity", e.rain_intensity},
            {"sun_altitude", e.sun_altitude},
            {"sun_azimuth", e.sun_azimuth},
            {"night", e.night},
            {"lead_class", to_string(e.lead_class)}}},
          {"seed", log.seed},
          {"terminal", to_string(log.terminal)},
          {"config_digest", log.config_digest},
          {"records", log.records.size()},
          {"duration", log.duration()},
          {"road", road_to_json(meta.road)}};
}

/// Rebuilds a log from its CSV text and sidecar metadata.
inline RunLog parse_run(std::istream & csv, const nlohmann::json & meta_json, RunMeta * meta_out = nullptr)
{
  RunLog log;
  try {
    log.modality = parse_modality(meta_json.at("modality").get<std::string>());
    log.driving_type = parse_driving_type(meta_json.at("driving_type").get<std::string>());
    const auto & e = meta_json.at("environment");
    log.environment.preset = parse_preset(e.at("preset").get<std::string>());
    log.environment.fog_fraction = e.at("fog_fraction").get<double>();
    log.environment.rain_intensity = e.at("rain_intensity").get<double>();
    log.environment.sun_altitude = e.at("sun_altitude").get<double>();
    log.environment.sun_azimuth = e.at("sun_azimuth").get<double>();
    log.environment.night = e.at("night").get<bool>();
    log.environment.lead_class = parse_lead_class(e.at("lead_class").get<std::string>());
    log.seed = meta_json.at("seed").get<std::uint64_t>();
    log.terminal = parse_terminal(meta_json.at("terminal").get<std::string>());
    log.config_digest = meta_json.at("config_digest").get<std::string>();
    if (meta_out) {
      meta_out->run_id = meta_json.at("run_id").get<std::string>();
      meta_out->condition = meta_json.at("condition").get<std::string>();
      meta_out->run_index = meta_json.at("run_index").get<std::size_t>();
      meta_out->road = road_from_json(meta_json.at("road"));
    }
  } catch (const nlohmann::json::exception & ex) {
    throw std::runtime_error(std::string("run meta: ") + ex.what());
  }
  log.records = read_log_csv(csv, rear_offset_for(log.environment.lead_class));
  return log;
}

/// The log exactly as it reads back from storage; analysis always runs on
/// this form so fresh and re-loaded metrics agree bit for bit.
inline RunLog storage_round_trip(const RunLog & log)
{
  std::stringstream ss;
  write_log_csv(ss, log);
  RunLog out = log;
  out.records = read_log_csv(ss, rear_offset_for(log.environment.lead_class));
  return out;
}

inline void write_text_file(const std::filesystem::path & path, const std::string & text)
{
  std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

inline std::string read_text_file(const std::filesystem::path & path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

/// Writes <dir>/<run_id>.csv and <dir>/<run_id>.meta.json.
inline void save_run(const std::filesystem::path & dir, const RunLog & log, const RunMeta & meta)
{
  std::ostringstream csv;
  write_log_csv(csv, log);
  write_text_file(dir / (meta.run_id + ".csv"), csv.str());
  write_text_file(dir / (meta.run_id + ".meta.json"), make_meta_json(log, meta).dump(2) + "\n");
}

struct StoredRun
{
  RunMeta meta;
  std::shared_ptr<const RunLog> log;
};

/// Loads every <run>.csv in dir that has a sidecar, sorted by run id.
inline std::vector<StoredRun> load_runs(const std::filesystem::path & dir)
{
  std::vector<StoredRun> out;
  if (!std::filesystem::is_directory(dir)) return out;
  std::vector<std::filesystem::path> csvs;
  for (const auto & entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") csvs.push_back(entry.path());
  }
  std::sort(csvs.begin(), csvs.end());
  for (const auto & path : csvs) {
    auto meta_path = path;
    meta_path.replace_extension(".meta.json");
    if (!std::filesystem::exists(meta_path)) continue;
    StoredRun run;
    std::ifstream csv(path, std::ios::binary);
    const auto meta_json = nlohmann::json::parse(read_text_file(meta_path));
    run.log = std::make_shared<const RunLog>(parse_run(csv, meta_json, &run.meta));
    out.push_back(std::move(run));
  }
  return out;
}

}  // namespace tripleloop

#endif  // TRIPLELOOP__LOG_IO_HPP_
