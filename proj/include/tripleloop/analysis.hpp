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

#ifndef TRIPLELOOP__ANALYSIS_HPP_
#define TRIPLELOOP__ANALYSIS_HPP_

#include "tripleloop/core.hpp"
#include "tripleloop/road.hpp"
#include "tripleloop/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace tripleloop
{

struct MetricRecord
{
  std::string run_id;
  double cd{0.0};       // mean centerline distance of the ego [m]
  double cd_hat{0.0};   // same, of the 500 ms prediction [m]
  double fd{0.0};       // mean following distance [m]
  double min_ttc{0.0};  // [s]
  double dr{1.0};       // mean detection ratio
  double dr_window{0.0};
};

struct AnalysisOptions
{
  double stopping_dr_window{10.0};
  double following_dr_window{0.0};
  double ttc_min_speed{0.1};
};

/// Perpendicular distance from e to the infinite line through c1 and c2.
inline double point_line_distance(const Pose & e, const Pose & c1, const Pose & c2)
{
  const double lx = c2.x - c1.x, ly = c2.y - c1.y;
  const double len = std::hypot(lx, ly);
  if (len == 0.0) throw std::invalid_argument("point_line_distance: c1 and c2 coincide");
  const double cross = lx * (e.y - c1.y) - ly * (e.x - c1.x);
  return std::abs(cross) / len;
}

inline double mean_centerline_distance(const RunLog & log, const Road & road, bool use_prediction)
{
  if (log.records.empty()) throw std::invalid_argument("mean_centerline_distance: empty log");
  double sum = 0.0;
  for (const auto & r : log.records) {
    const Pose & p = use_prediction ? r.predicted_pose_500ms : r.ego.pose;
    const auto [c1, c2] = nearest_centerline_pair(road, p);
    sum += point_line_distance(p, c1, c2);
  }
  return sum / static_cast<double>(log.records.size());
}

/// Smallest d_t / v_t over samples moving at least min_speed; 0 for a collision run.
inline double min_ttc(const RunLog & log, double min_speed = 0.1)
{
  if (log.records.empty()) throw std::invalid_argument("min_ttc: empty log");
  if (log.terminal == Terminal::Collision) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto & r : log.records) {
    if (r.ego.speed < min_speed) continue;
    best = std::min(best, std::max(r.true_distance, 0.0) / r.ego.speed);
  }
  if (std::isinf(best)) throw std::invalid_argument("min_ttc: no sample above the speed threshold");
  return best;
}

inline double mean_following_distance(const RunLog & log)
{
  if (log.records.empty()) throw std::invalid_argument("mean_following_distance: empty log");
  double sum = 0.0;
  for (const auto & r : log.records) sum += r.true_distance;
  return sum / static_cast<double>(log.records.size());
}

/// Mean of d_hat / d over detected samples with d above min_distance.
inline double mean_detection_ratio(const RunLog & log, double min_distance)
{
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto & r : log.records) {
    if (!r.perceived_distance || !(r.true_distance > min_distance)) continue;
    sum += *r.perceived_distance / r.true_distance;
    ++count;
  }
  if (count == 0) throw std::invalid_argument("mean_detection_ratio: no qualifying samples");
  return sum / static_cast<double>(count);
}

inline double dr_window_for(DrivingType type, const AnalysisOptions & opt)
{
  return type == DrivingType::Stopping ? opt.stopping_dr_window : opt.following_dr_window;
}

inline MetricRecord compute_metrics(
  const RunLog & log, const Road & road, std::string run_id, const AnalysisOptions & opt = {})
{
  MetricRecord m;
  m.run_id = std::move(run_id);
  m.cd = mean_centerline_distance(log, road, false);
  m.cd_hat = mean_centerline_distance(log, road, true);
  m.fd = mean_following_distance(log);
  m.min_ttc = min_ttc(log, opt.ttc_min_speed);
  m.dr_window = dr_window_for(log.driving_type, opt);
  m.dr = mean_detection_ratio(log, m.dr_window);
  return m;
}

// ---------------------------------------------------------------------------
// Diagnosis and prediction tables
// ---------------------------------------------------------------------------

/// Runs of one experimental condition. The label identifies the condition
/// across modalities (e.g. "Stopping/Night/BlackSedan").
struct ConditionMetrics
{
  std::string label;
  DrivingType driving_type{DrivingType::Stopping};
  std::vector<MetricRecord> runs;
};

enum class MetricKind { CD, CDhat, FD, MinTTC, DR };

inline std::string_view to_string(MetricKind k)
{
  switch (k) {
    case MetricKind::CD: return "CD";
    case MetricKind::CDhat: return "CDhat";
    case MetricKind::FD: return "FD";
    case MetricKind::MinTTC: return "minTTC";
    case MetricKind::DR: return "DR";
  }
  return "?";
}

inline double metric_value(const MetricRecord & m, MetricKind k)
{
  switch (k) {
    case MetricKind::CD: return m.cd;
    case MetricKind::CDhat: return m.cd_hat;
    case MetricKind::FD: return m.fd;
    case MetricKind::MinTTC: return m.min_ttc;
    case MetricKind::DR: return m.dr;
  }
  return 0.0;
}

/// Sample mean with its min-max pair; the pair bounds the plotting oval.
struct MetricSummary
{
  double mean{0.0};
  double min{0.0};
  double max{0.0};
};

inline MetricSummary summarize(const std::vector<MetricRecord> & runs, MetricKind k)
{
  std::vector<double> v;
  v.reserve(runs.size());
  for (const auto & r : runs) v.push_back(metric_value(r, k));
  const auto [lo, hi] = sample_minmax(v);
  return {sample_mean(v), lo, hi};
}

struct ScatterPoint
{
  std::string label;
  double x{0.0};
  double y{0.0};
  // Populated for condition-level points only.
  MetricSummary x_summary{};
  MetricSummary y_summary{};
};

struct TableRow
{
  DrivingType driving_type{DrivingType::Stopping};
  MetricKind predictive{MetricKind::DR};
  MetricKind response{MetricKind::MinTTC};
  CorrelationResult diagnosis{};
  CorrelationResult prediction{};
  std::vector<ScatterPoint> diagnosis_points;
  std::vector<ScatterPoint> prediction_points;
};

struct Tables
{
  std::vector<TableRow> rows;
};

/// The three metric pairs that make up the correlation table.
inline constexpr std::tuple<DrivingType, MetricKind, MetricKind> kTablePairs[] = {
  {DrivingType::Stopping, MetricKind::DR, MetricKind::MinTTC},
  {DrivingType::Following, MetricKind::DR, MetricKind::FD},
  {DrivingType::Following, MetricKind::CDhat, MetricKind::CD},
};

inline TableRow build_table_row(
  const std::vector<ConditionMetrics> & vil, const std::vector<ConditionMetrics> & mil, DrivingType type,
  MetricKind predictive, MetricKind response)
{
  TableRow row;
  row.driving_type = type;
  row.predictive = predictive;
  row.response = response;

  std::vector<double> xs, ys;
  std::map<std::string, const ConditionMetrics *> vil_by_label;
  for (const auto & c : vil) {
    if (c.driving_type != type) continue;
    if (c.runs.empty()) throw std::invalid_argument("build_tables: empty condition " + c.label);
    vil_by_label[c.label] = &c;
    for (const auto & r : c.runs) {
      xs.push_back(metric_value(r, predictive));
      ys.push_back(metric_value(r, response));
      row.diagnosis_points.push_back({r.run_id, xs.back(), ys.back(), {}, {}});
    }
  }
  row.diagnosis = pearson(xs, ys);

  xs.clear();
  ys.clear();
  for (const auto & c : mil) {
    if (c.driving_type != type) continue;
    if (c.runs.empty()) throw std::invalid_argument("build_tables: empty condition " + c.label);
    const auto it = vil_by_label.find(c.label);
    if (it == vil_by_label.end()) continue;
    ScatterPoint pt;
    pt.label = c.label;
    pt.x_summary = summarize(c.runs, predictive);
    pt.y_summary = summarize(it->second->runs, response);
    pt.x = pt.x_summary.mean;
    pt.y = pt.y_summary.mean;
    xs.push_back(pt.x);
    ys.push_back(pt.y);
    row.prediction_points.push_back(pt);
  }
  if (xs.size() < 3) {
    throw std::invalid_argument(
      "build_tables: prediction for " + std::string(to_string(type)) + " needs >= 3 matched conditions, got " +
      std::to_string(xs.size()));
  }
  row.prediction = pearson(xs, ys);
  return row;
}

/// Diagnosis pools per-run VIL pairs; prediction pairs MIL condition means of
/// the predictive metric with VIL condition means of the response metric.
inline Tables build_tables(const std::vector<ConditionMetrics> & vil, const std::vector<ConditionMetrics> & mil)
{
  Tables t;
  for (const auto & [type, predictive, response] : kTablePairs) {
    t.rows.push_back(build_table_row(vil, mil, type, predictive, response));
  }
  return t;
}

}  // namespace tripleloop

#endif  // TRIPLELOOP__ANALYSIS_HPP_
