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

#ifndef TRIPLELOOP__REPORT_HPP_
#define TRIPLELOOP__REPORT_HPP_

#include "tripleloop/analysis.hpp"
#include "tripleloop/log_io.hpp"
#include "tripleloop/suite.hpp"

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

namespace tripleloop
{

inline constexpr MetricKind kAllMetrics[] = {
  MetricKind::CD, MetricKind::CDhat, MetricKind::FD, MetricKind::MinTTC, MetricKind::DR};

/// Per-condition means with min-max whiskers, one block per modality.
inline Json metric_bars_json(const std::vector<SuiteRun> & runs)
{
  Json out = Json::object();
  for (const auto & [modality, conditions] : group_by_condition(runs)) {
    Json list = Json::array();
    for (const auto & c : conditions) {
      Json metrics = Json::object();
      for (MetricKind k : kAllMetrics) {
        const MetricSummary s = summarize(c.runs, k);
        Json values = Json::array();
        for (const auto & r : c.runs) values.push_back(metric_value(r, k));
        metrics[std::string(to_string(k))] = {{"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"runs", values}};
      }
      list.push_back({{"condition", c.label}, {"n", c.runs.size()}, {"metrics", metrics}});
    }
    out[std::string(to_string(modality))] = list;
  }
  return out;
}

inline constexpr double kSeriesMinDistance = 10.0;
inline constexpr double kSeriesMaxDistance = 50.0;

/// Speed, commanded deceleration and detection ratio against true distance for
/// Stopping samples strictly inside the 10-50 m window.
inline std::string approach_series_csv(const std::vector<SuiteRun> & runs)
{
  std::ostringstream os;
  os << "run_id,modality,condition,t,d,ego_v,accel_cmd,dr\n";
  for (const auto & r : runs) {
    if (r.condition.driving_type != DrivingType::Stopping) continue;
    for (const auto & rec : r.log->records) {
      if (!(rec.true_distance > kSeriesMinDistance && rec.true_distance < kSeriesMaxDistance)) continue;
      os << r.run_id << ',' << to_string(r.condition.modality) << ',' << r.condition.label() << ','
         << format_number(rec.t) << ',' << format_number(rec.true_distance) << ',' << format_number(rec.ego.speed)
         << ',' << format_number(rec.accel_cmd) << ','
         << (rec.perceived_distance ? format_number(*rec.perceived_distance / rec.true_distance) : "") << '\n';
    }
  }
  return os.str();
}

namespace detail
{
inline Json summary_json(const MetricSummary & s) { return {{"mean", s.mean}, {"min", s.min}, {"max", s.max}}; }

inline Json regression_line(const CorrelationResult & c, const std::vector<ScatterPoint> & pts)
{
  double lo = pts.front().x, hi = pts.front().x;
  for (const auto & p : pts) {
    lo = std::min(lo, p.x);
    hi = std::max(hi, p.x);
  }
  return {{"slope", c.slope},
          {"intercept", c.intercept},
          {"x0", lo},
          {"y0", c.slope * lo + c.intercept},
          {"x1", hi},
          {"y1", c.slope * hi + c.intercept}};
}

inline std::string row_name(const TableRow & row)
{
  return std::string(to_string(row.driving_type)) + ":" + std::string(to_string(row.predictive)) + "-" +
         std::string(to_string(row.response));
}
}  // namespace detail

/// Diagnosis and prediction scatter points, regression lines and ovals.
inline Json scatter_json(const Tables & tables)
{
  Json out = Json::array();
  for (const auto & row : tables.rows) {
    Json diag = Json::array();
    for (const auto & p : row.diagnosis_points) diag.push_back({{"run_id", p.label}, {"x", p.x}, {"y", p.y}});
    Json pred = Json::array();
    for (const auto & p : row.prediction_points) {
      pred.push_back({{"condition", p.label},
                      {"x", p.x},
                      {"y", p.y},
                      {"oval", {{"x", detail::summary_json(p.x_summary)}, {"y", detail::summary_json(p.y_summary)}}}});
    }
    out.push_back({{"pair", detail::row_name(row)},
                   {"x_metric", to_string(row.predictive)},
                   {"y_metric", to_string(row.response)},
                   {"diagnosis", {{"points", diag}, {"line", detail::regression_line(row.diagnosis, row.diagnosis_points)}}},
                   {"prediction",
                    {{"points", pred}, {"line", detail::regression_line(row.prediction, row.prediction_points)}}}});
  }
  return out;
}

/// Correlation table: three diagnosis rows (VIL to VIL) and three prediction
/// rows (MIL to VIL), each with r, p and n.
inline Json table_json(const Tables & tables)
{
  Json diagnosis = Json::array();
  Json prediction = Json::array();
  for (const auto & row : tables.rows) {
    const auto entry = [&](const CorrelationResult & c) {
      return Json{{"driving_type", to_string(row.driving_type)},
                  {"predictive", to_string(row.predictive)},
                  {"response", to_string(row.response)},
                  {"r", c.r},
                  {"p", c.p_value},
                  {"n", c.n}};
    };
    diagnosis.push_back(entry(row.diagnosis));
    prediction.push_back(entry(row.prediction));
  }
  return {{"diagnosis", diagnosis}, {"prediction", prediction}};
}

inline std::string fog_sweep_csv(const Json & sweep)
{
  std::ostringstream os;
  os << "fog_fraction,dr,predicted_min_ttc,predicted_collision\n";
  for (const auto & p : sweep.at("points")) {
    os << format_number(p.at("fog_fraction").get<double>()) << ',' << format_number(p.at("DR").get<double>()) << ',';
    if (p.contains("predicted_minTTC")) {
      os << format_number(p.at("predicted_minTTC").get<double>()) << ','
         << (p.at("predicted_collision").get<bool>() ? 1 : 0);
    } else {
      os << ',';
    }
    os << '\n';
  }
  return os.str();
}

inline std::string sun_sweep_csv(const Json & sweep)
{
  std::ostringstream os;
  os << "sun_altitude,sun_azimuth,dr\n";
  for (const auto & p : sweep.at("points")) {
    os << format_number(p.at("sun_altitude").get<double>()) << ',' << format_number(p.at("sun_azimuth").get<double>())
       << ',' << format_number(p.at("DR").get<double>()) << '\n';
  }
  return os.str();
}

/// Writes every plot-data file into dir. Sweep files are included when the
/// corresponding sweep JSON exists under sweep_dir.
inline std::vector<std::filesystem::path> emit_reports(
  const std::filesystem::path & dir, const std::vector<SuiteRun> & runs, const Tables & tables,
  const std::filesystem::path & sweep_dir)
{
  std::vector<std::filesystem::path> written;
  const auto put = [&](const std::string & name, const std::string & text) {
    write_text_file(dir / name, text);
    written.push_back(dir / name);
  };
  put("metric_bars.json", metric_bars_json(runs).dump(2) + "\n");
  put("approach_series.csv", approach_series_csv(runs));
  put("scatter.json", scatter_json(tables).dump(2) + "\n");
  put("table.json", table_json(tables).dump(2) + "\n");
  if (std::filesystem::exists(sweep_dir / "fog_sweep.json")) {
    put("fog_sweep.csv", fog_sweep_csv(Json::parse(read_text_file(sweep_dir / "fog_sweep.json"))));
  }
  if (std::filesystem::exists(sweep_dir / "sun_sweep.json")) {
    put("sun_sweep.csv", sun_sweep_csv(Json::parse(read_text_file(sweep_dir / "sun_sweep.json"))));
  }
  return written;
}

}  // namespace tripleloop

#endif  // TRIPLELOOP__REPORT_HPP_
