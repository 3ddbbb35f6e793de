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

#ifndef TRIPLELOOP__SUITE_HPP_
#define TRIPLELOOP__SUITE_HPP_

#include "tripleloop/analysis.hpp"
#include "tripleloop/config.hpp"
#include "tripleloop/log_io.hpp"
#include "tripleloop/loop.hpp"

#include <atomic>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace tripleloop
{

struct SuiteCondition
{
  DrivingType driving_type{DrivingType::Stopping};
  Modality modality{Modality::VIL};
  EnvironmentPreset preset{EnvironmentPreset::NoonClear};
  LeadClass lead_class{LeadClass::BlackSedan};
  std::size_t runs{1};

  /// Modality-free label shared by the VIL and MIL runs of one condition.
  std::string label() const
  {
    return std::string(to_string(driving_type)) + "/" + std::string(to_string(preset)) + "/" +
           std::string(to_string(lead_class));
  }
  std::string id() const { return std::string(to_string(modality)) + "/" + label(); }
  std::string run_id(std::size_t index) const
  {
    char buf[8];
    std::snprintf(buf, sizeof buf, "r%02zu", index);
    std::string s = id() + "/" + buf;
    std::replace(s.begin(), s.end(), '/', '-');
    return s;
  }
};

struct ExperimentSuite
{
  std::string name;
  std::vector<SuiteCondition> conditions;
  std::uint64_t base_seed{0};
  std::string output_dir;
  EnvironmentPreset rail_preset{EnvironmentPreset::Night};
  LeadClass rail_lead_class{LeadClass::BlackSedan};
};

/// Modality-major expansion of the configured condition matrix.
inline ExperimentSuite make_suite(const Config & cfg)
{
  ExperimentSuite s;
  s.name = cfg.suite.name;
  s.base_seed = cfg.suite.base_seed;
  s.output_dir = cfg.suite.output_dir;
  s.rail_preset = cfg.suite.rail_preset;
  s.rail_lead_class = cfg.suite.rail_lead_class;
  for (Modality m : cfg.suite.modalities) {
    for (const auto & c : cfg.suite.conditions) {
      s.conditions.push_back({c.driving_type, m, c.preset, c.lead_class, c.runs});
    }
  }
  return s;
}

struct SuiteRun
{
  SuiteCondition condition;
  std::size_t run_index{0};
  std::string run_id;
  std::shared_ptr<const RunLog> log;  // storage-quantized
  MetricRecord metrics;
};

struct SuiteResult
{
  std::string name;
  std::string config_digest;
  std::uint64_t base_seed{0};
  std::vector<SuiteRun> runs;  // condition order, then run index
  std::vector<RoadSegment> road;
};

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. The first
/// exception stops the pool and is rethrown.
inline void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)> & fn)
{
  if (count == 0) return;
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count && !stop; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            stop = true;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

inline ScenarioSpec make_scenario(DrivingType type, LeadClass lead, const Config & cfg, std::shared_ptr<const Road> road)
{
  return type == DrivingType::Stopping ? build_stopping_scenario(std::move(road), lead, cfg.scenario)
                                       : build_following_scenario(std::move(road), lead, cfg.scenario);
}

inline RunConfig make_run_config(
  Modality modality, DrivingType type, const Environment & env, const Config & cfg, std::shared_ptr<const Road> road,
  std::uint64_t seed, const std::string & digest)
{
  RunConfig rc;
  rc.modality = modality;
  rc.scenario = make_scenario(type, env.lead_class, cfg, std::move(road));
  rc.environment = env;
  rc.vehicle = cfg.vehicle;
  rc.gains = cfg.controller;
  rc.perception = cfg.perception;
  rc.plant = cfg.plant;
  rc.seed = seed;
  rc.config_digest = digest;
  return rc;
}

/// Checks MIL dependencies before anything runs.
inline void validate_suite(const ExperimentSuite & suite)
{
  if (suite.conditions.empty()) throw std::invalid_argument("suite: no conditions");
  std::set<std::string> ids;
  for (const auto & c : suite.conditions) {
    if (c.runs < 1) throw std::invalid_argument("suite: condition " + c.id() + " has no runs");
    if (!ids.insert(c.id()).second) throw std::invalid_argument("suite: duplicate condition " + c.id());
  }
  for (const auto & c : suite.conditions) {
    if (c.modality != Modality::MIL) continue;
    const SuiteCondition src{c.driving_type, Modality::VIL, suite.rail_preset, suite.rail_lead_class, 1};
    if (!ids.count(src.id())) {
      throw std::invalid_argument("suite: MIL condition " + c.id() + " needs rail source condition " + src.id());
    }
  }
}

using ProgressFn = std::function<void(const SuiteRun &)>;

/// Closed-loop conditions run first; MIL conditions then replay the VIL rail
/// source logs of their driving type, run i on source i mod n.
inline SuiteResult run_suite(
  const ExperimentSuite & suite, const Config & cfg, std::size_t jobs, const ProgressFn & progress = {})
{
  validate_suite(suite);
  const auto road = cfg.make_road();
  SuiteResult result;
  result.name = suite.name;
  result.config_digest = config_digest(cfg);
  result.base_seed = suite.base_seed;
  result.road = cfg.road_segments;

  struct Task
  {
    std::size_t condition;
    std::size_t index;
  };
  std::vector<Task> closed, open;
  for (std::size_t c = 0; c < suite.conditions.size(); ++c) {
    for (std::size_t i = 0; i < suite.conditions[c].runs; ++i) {
      (suite.conditions[c].modality == Modality::MIL ? open : closed).push_back({c, i});
    }
  }

  std::map<std::pair<std::size_t, std::size_t>, SuiteRun> done;
  std::mutex done_mutex;
  std::mutex progress_mutex;

  const auto execute = [&](const Task & task, std::shared_ptr<const RunLog> rail) {
    const SuiteCondition & cond = suite.conditions[task.condition];
    const Environment env = make_environment(cond.preset, cond.lead_class, cond.driving_type, cfg.perception);
    RunConfig rc = make_run_config(
      cond.modality, cond.driving_type, env, cfg, road, derive_seed(suite.base_seed, cond.id(), task.index),
      result.config_digest);
    rc.rail_source = std::move(rail);
    SuiteRun out;
    out.condition = cond;
    out.run_index = task.index;
    out.run_id = cond.run_id(task.index);
    auto log = std::make_shared<const RunLog>(storage_round_trip(run(rc)));
    out.metrics = compute_metrics(*log, *road, out.run_id, cfg.analysis);
    out.log = std::move(log);
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(out);
    }
    std::lock_guard lock(done_mutex);
    done[{task.condition, task.index}] = std::move(out);
  };

  parallel_for(closed.size(), jobs, [&](std::size_t i) { execute(closed[i], nullptr); });

  std::map<DrivingType, std::vector<std::shared_ptr<const RunLog>>> rails;
  for (std::size_t c = 0; c < suite.conditions.size(); ++c) {
    const auto & cond = suite.conditions[c];
    if (cond.modality != Modality::VIL || cond.preset != suite.rail_preset || cond.lead_class != suite.rail_lead_class) {
      continue;
    }
    for (std::size_t i = 0; i < cond.runs; ++i) rails[cond.driving_type].push_back(done.at({c, i}).log);
  }
  parallel_for(open.size(), jobs, [&](std::size_t i) {
    const auto & sources = rails.at(suite.conditions[open[i].condition].driving_type);
    execute(open[i], sources[open[i].index % sources.size()]);
  });

  for (std::size_t c = 0; c < suite.conditions.size(); ++c) {
    for (std::size_t i = 0; i < suite.conditions[c].runs; ++i) result.runs.push_back(std::move(done.at({c, i})));
  }
  return result;
}

/// Groups runs by modality and condition label, in first-seen order.
inline std::map<Modality, std::vector<ConditionMetrics>> group_by_condition(const std::vector<SuiteRun> & runs)
{
  std::map<Modality, std::vector<ConditionMetrics>> out;
  for (const auto & r : runs) {
    auto & list = out[r.condition.modality];
    const std::string label = r.condition.label();
    auto it = std::find_if(list.begin(), list.end(), [&](const ConditionMetrics & c) { return c.label == label; });
    if (it == list.end()) {
      list.push_back({label, r.condition.driving_type, {}});
      it = std::prev(list.end());
    }
    it->runs.push_back(r.metrics);
  }
  return out;
}

inline Tables tables_for(const std::vector<SuiteRun> & runs)
{
  auto grouped = group_by_condition(runs);
  return build_tables(grouped[Modality::VIL], grouped[Modality::MIL]);
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

enum class SweepKind { FogLevel, SunAngle };

inline std::string_view to_string(SweepKind k) { return k == SweepKind::FogLevel ? "FogLevel" : "SunAngle"; }

inline SweepKind parse_sweep_kind(std::string_view s)
{
  static constexpr std::pair<std::string_view, SweepKind> table[] = {
    {"FogLevel", SweepKind::FogLevel}, {"SunAngle", SweepKind::SunAngle}};
  return detail::parse_enum(s, table, "sweep kind");
}

struct SweepPoint
{
  std::string run_id;
  double fog_fraction{0.0};
  double sun_altitude{0.0};
  double sun_azimuth{0.0};
  double dr{0.0};
  Terminal terminal{Terminal::Timeout};
  std::optional<double> predicted_min_ttc;
  bool predicted_collision{false};
};

struct LinearFit
{
  double slope{0.0};
  double intercept{0.0};
  double r{0.0};
  std::size_t n{0};
};

struct SweepResult
{
  SweepKind kind{SweepKind::FogLevel};
  std::vector<SweepPoint> points;
  std::vector<std::string> warnings;
  // FogLevel summary
  double knee{0.0};
  double flat_mean_dr{0.0};
  double flat_max_relative_deviation{0.0};
  std::optional<LinearFit> above_knee_fit;
  std::optional<CorrelationResult> prediction;
  double flag_min_ttc{0.0};
  // SunAngle summary: mean DR over cells where the sun has no effect.
  std::optional<double> baseline_dr;
};

/// Fog-level grid over [start, start + (count - 1) step].
inline std::vector<double> fog_grid(const FogSweepSettings & s)
{
  std::vector<double> g;
  for (std::size_t i = 0; i < s.count; ++i) g.push_back(s.grid_start + s.grid_step * static_cast<double>(i));
  return g;
}

namespace detail
{
inline void check_rails(const std::vector<std::shared_ptr<const RunLog>> & rails)
{
  if (rails.empty()) throw std::invalid_argument("sweep: no rail source logs available");
  for (const auto & r : rails) {
    if (!r || r->driving_type != DrivingType::Stopping) {
      throw std::invalid_argument("sweep: rail sources must be Stopping closed-loop logs");
    }
  }
}

inline SweepPoint sweep_run(
  const Environment & env, const std::string & id, std::size_t index, const Config & cfg,
  const std::shared_ptr<const Road> & road, const std::shared_ptr<const RunLog> & rail, const std::string & digest)
{
  RunConfig rc = make_run_config(
    Modality::MIL, DrivingType::Stopping, env, cfg, road, derive_seed(cfg.suite.base_seed, id, index), digest);
  rc.rail_source = rail;
  const RunLog log = storage_round_trip(run(rc));
  SweepPoint p;
  p.fog_fraction = env.fog_fraction;
  p.sun_altitude = env.sun_altitude;
  p.sun_azimuth = env.sun_azimuth;
  p.dr = mean_detection_ratio(log, cfg.analysis.stopping_dr_window);
  p.terminal = log.terminal;
  return p;
}
}  // namespace detail

/// MIL Stopping runs over the fog grid in rain. When a prediction regression
/// (MIL DR to VIL minTTC) is given, each point whose predicted minTTC falls
/// below the flag threshold is marked as collision-imminent.
inline SweepResult run_fog_sweep(
  const Config & cfg, const std::vector<std::shared_ptr<const RunLog>> & rails,
  const std::optional<CorrelationResult> & prediction, std::size_t jobs)
{
  detail::check_rails(rails);
  const FogSweepSettings & fs = cfg.sweeps.fog;
  const auto grid = fog_grid(fs);
  SweepResult out;
  out.kind = SweepKind::FogLevel;
  out.knee = cfg.perception.fog_knee;
  out.prediction = prediction;
  out.flag_min_ttc = fs.flag_min_ttc;
  if (grid.size() != fs.expected_runs) {
    out.warnings.push_back(
      "fog sweep grid has " + std::to_string(grid.size()) + " points, expected " + std::to_string(fs.expected_runs));
  }
  if (!prediction) out.warnings.push_back("no prediction regression available; collision flags not evaluated");

  const auto road = cfg.make_road();
  const std::string digest = config_digest(cfg);
  const PresetEntry & rain_row = cfg.perception.entry(EnvironmentPreset::RainFog);
  out.points.resize(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    Environment env;
    env.preset = EnvironmentPreset::Custom;
    env.fog_fraction = std::min(grid[i], 1.0);
    env.rain_intensity = fs.rain_intensity;
    env.sun_altitude = rain_row.sun_altitude;
    env.sun_azimuth = rain_row.sun_azimuth;
    env.lead_class = fs.lead_class;
    const std::string id = "FogLevel";
    SweepPoint p = detail::sweep_run(env, id, i, cfg, road, rails[i % rails.size()], digest);
    char buf[16];
    std::snprintf(buf, sizeof buf, "f%03zu", i);
    p.run_id = std::string("MIL-FogLevel-") + buf;
    if (prediction) {
      p.predicted_min_ttc = prediction->slope * p.dr + prediction->intercept;
      p.predicted_collision = *p.predicted_min_ttc < fs.flag_min_ttc;
    }
    out.points[i] = p;
  });

  std::vector<double> flat, xs, ys;
  for (const auto & p : out.points) {
    if (p.fog_fraction < out.knee) {
      flat.push_back(p.dr);
    } else {
      xs.push_back(p.fog_fraction);
      ys.push_back(p.dr);
    }
  }
  if (!flat.empty()) {
    out.flat_mean_dr = sample_mean(flat);
    for (double v : flat) {
      out.flat_max_relative_deviation = std::max(out.flat_max_relative_deviation, std::abs(v / out.flat_mean_dr - 1.0));
    }
  }
  if (xs.size() >= 3) {
    const CorrelationResult c = pearson(xs, ys);
    out.above_knee_fit = LinearFit{c.slope, c.intercept, c.r, c.n};
  }
  return out;
}

/// MIL Stopping runs over the altitude x azimuth grid in clear daylight.
inline SweepResult run_sun_sweep(
  const Config & cfg, const std::vector<std::shared_ptr<const RunLog>> & rails, std::size_t jobs)
{
  detail::check_rails(rails);
  const SunSweepSettings & ss = cfg.sweeps.sun;
  SweepResult out;
  out.kind = SweepKind::SunAngle;
  const std::size_t n = ss.altitudes.size() * ss.azimuths.size();
  if (n != ss.expected_runs) {
    out.warnings.push_back(
      "sun sweep grid has " + std::to_string(n) + " points, expected " + std::to_string(ss.expected_runs));
  }
  const auto road = cfg.make_road();
  const std::string digest = config_digest(cfg);
  out.points.resize(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    Environment env;
    env.preset = EnvironmentPreset::Custom;
    env.sun_altitude = ss.altitudes[i / ss.azimuths.size()];
    env.sun_azimuth = ss.azimuths[i % ss.azimuths.size()];
    env.lead_class = ss.lead_class;
    SweepPoint p = detail::sweep_run(env, "SunAngle", i, cfg, road, rails[i % rails.size()], digest);
    char buf[16];
    std::snprintf(buf, sizeof buf, "s%03zu", i);
    p.run_id = std::string("MIL-SunAngle-") + buf;
    out.points[i] = p;
  });

  // Cells outside both cones for every heading the rail visits.
  std::vector<double> neutral;
  for (const auto & p : out.points) {
    bool affected = false;
    for (const auto & rail : rails) {
      for (const auto & rec : rail->records) {
        const double rel = relative_sun_azimuth_deg(p.sun_azimuth, rec.ego.pose.heading);
        if (sun_factor(rel, p.sun_altitude, false, cfg.perception) != 1.0) affected = true;
        if (affected) break;
      }
      if (affected) break;
    }
    if (!affected) neutral.push_back(p.dr);
  }
  if (!neutral.empty()) out.baseline_dr = sample_mean(neutral);
  return out;
}

// ---------------------------------------------------------------------------
// JSON views
// ---------------------------------------------------------------------------

inline Json metrics_to_json(const MetricRecord & m)
{
  return {{"CD", m.cd}, {"CDhat", m.cd_hat}, {"FD", m.fd}, {"minTTC", m.min_ttc}, {"DR", m.dr}, {"DR_window", m.dr_window}};
}

inline Json correlation_to_json(const CorrelationResult & c)
{
  return {{"r", c.r}, {"p", c.p_value}, {"n", c.n}, {"slope", c.slope}, {"intercept", c.intercept}};
}

inline Json suite_summary_json(const SuiteResult & s)
{
  Json runs = Json::array();
  for (const auto & r : s.runs) {
    runs.push_back({{"run_id", r.run_id},
                    {"condition", r.condition.id()},
                    {"modality", to_string(r.condition.modality)},
                    {"driving_type", to_string(r.condition.driving_type)},
                    {"preset", to_string(r.condition.preset)},
                    {"lead_class", to_string(r.condition.lead_class)},
                    {"run_index", r.run_index},
                    {"seed", r.log->seed},
                    {"terminal", to_string(r.log->terminal)},
                    {"records", r.log->records.size()},
                    {"duration", r.log->duration()},
                    {"metrics", metrics_to_json(r.metrics)}});
  }
  return {{"name", s.name},
          {"config_digest", s.config_digest},
          {"base_seed", s.base_seed},
          {"run_count", s.runs.size()},
          {"runs", runs}};
}

inline Json sweep_to_json(const SweepResult & s)
{
  Json pts = Json::array();
  for (const auto & p : s.points) {
    Json j = {{"run_id", p.run_id}, {"DR", p.dr}, {"terminal", to_string(p.terminal)}};
    if (s.kind == SweepKind::FogLevel) {
      j["fog_fraction"] = p.fog_fraction;
      if (p.predicted_min_ttc) {
        j["predicted_minTTC"] = *p.predicted_min_ttc;
        j["predicted_collision"] = p.predicted_collision;
      }
    } else {
      j["sun_altitude"] = p.sun_altitude;
      j["sun_azimuth"] = p.sun_azimuth;
    }
    pts.push_back(j);
  }
  Json out = {{"kind", to_string(s.kind)}, {"points", pts}, {"warnings", s.warnings}};
  if (s.kind == SweepKind::FogLevel) {
    Json summary = {{"knee", s.knee},
                    {"flat_mean_DR", s.flat_mean_dr},
                    {"flat_max_relative_deviation", s.flat_max_relative_deviation},
                    {"flag_minTTC_threshold", s.flag_min_ttc}};
    if (s.above_knee_fit) {
      summary["above_knee_fit"] = {{"slope", s.above_knee_fit->slope},
                                   {"intercept", s.above_knee_fit->intercept},
                                   {"r", s.above_knee_fit->r},
                                   {"n", s.above_knee_fit->n}};
    }
    if (s.prediction) summary["prediction_regression"] = correlation_to_json(*s.prediction);
    std::optional<double> first_flag;
    for (const auto & p : s.points) {
      if (p.predicted_collision) {
        first_flag = p.fog_fraction;
        break;
      }
    }
    summary["first_flagged_fog"] = first_flag ? Json(*first_flag) : Json(nullptr);
    out["summary"] = summary;
  } else {
    out["summary"] = {{"baseline_DR", s.baseline_dr ? Json(*s.baseline_dr) : Json(nullptr)}};
  }
  return out;
}

/// Writes logs and the suite summary from the collecting thread only.
inline void save_suite(const std::filesystem::path & out_dir, const SuiteResult & s)
{
  for (const auto & r : s.runs) {
    save_run(out_dir / "logs", *r.log, {r.run_id, r.condition.id(), r.run_index, s.road});
  }
  write_text_file(out_dir / "summary.json", suite_summary_json(s).dump(2) + "\n");
}

/// Rebuilds suite runs from stored logs, recomputing metrics.
inline std::vector<SuiteRun> runs_from_storage(const std::vector<StoredRun> & stored, const AnalysisOptions & opt)
{
  std::vector<SuiteRun> out;
  for (const auto & s : stored) {
    SuiteRun r;
    r.condition = {s.log->driving_type, s.log->modality, s.log->environment.preset, s.log->environment.lead_class, 1};
    r.run_index = s.meta.run_index;
    r.run_id = s.meta.run_id;
    r.log = s.log;
    const Road road(s.meta.road);
    r.metrics = compute_metrics(*s.log, road, r.run_id, opt);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace tripleloop

#endif  // TRIPLELOOP__SUITE_HPP_
