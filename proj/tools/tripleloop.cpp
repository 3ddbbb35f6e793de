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

#include "tripleloop/config.hpp"
#include "tripleloop/log_io.hpp"
#include "tripleloop/report.hpp"
#include "tripleloop/suite.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace tripleloop;

namespace
{

constexpr const char * kOutEnv = "TRIPLELOOP_OUT";

struct Options
{
  std::string config_path{TRIPLELOOP_DEFAULT_CONFIG};
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::string> out;
  std::string sweep_kind{"all"};
};

struct Context
{
  Config config;
  fs::path out_dir;
  std::size_t jobs{1};
};

// Precedence for the output directory: --out, then the environment, then the config.
Context make_context(const Options & opt)
{
  Context ctx;
  ctx.config = load_config(opt.config_path);
  if (opt.seed) ctx.config.suite.base_seed = *opt.seed;
  ctx.jobs = opt.jobs ? *opt.jobs : ctx.config.suite.jobs;
  if (ctx.jobs == 0) throw std::invalid_argument("--jobs must be >= 1");
  if (opt.out) {
    ctx.out_dir = *opt.out;
  } else if (const char * env = std::getenv(kOutEnv); env && *env) {
    ctx.out_dir = env;
  } else {
    ctx.out_dir = ctx.config.suite.output_dir;
  }
  return ctx;
}

std::vector<StoredRun> require_runs(const fs::path & out_dir)
{
  auto stored = load_runs(out_dir / "logs");
  if (stored.empty()) throw std::runtime_error("no run logs found in " + (out_dir / "logs").string());
  return stored;
}

int cmd_run(const Context & ctx)
{
  const ExperimentSuite suite = make_suite(ctx.config);
  std::size_t total = 0;
  for (const auto & c : suite.conditions) total += c.runs;
  std::size_t finished = 0;
  const SuiteResult result = run_suite(suite, ctx.config, ctx.jobs, [&](const SuiteRun & r) {
    ++finished;
    std::fprintf(stderr, "[%zu/%zu] %s %s\n", finished, total, r.run_id.c_str(),
                 std::string(to_string(r.log->terminal)).c_str());
  });
  save_suite(ctx.out_dir, result);
  std::printf("wrote %zu runs to %s\n", result.runs.size(), ctx.out_dir.string().c_str());
  return 0;
}

int cmd_sweep(const Context & ctx, const std::string & kind)
{
  const auto stored = require_runs(ctx.out_dir);
  const std::string digest = config_digest(ctx.config);
  std::vector<std::shared_ptr<const RunLog>> rails;
  for (const auto & s : stored) {
    if (s.log->config_digest != digest) {
      throw std::runtime_error("stored run " + s.meta.run_id + " was produced by a different config; rerun `run`");
    }
    const auto & e = s.log->environment;
    if (s.log->modality == Modality::VIL && s.log->driving_type == DrivingType::Stopping &&
        e.preset == ctx.config.suite.rail_preset && e.lead_class == ctx.config.suite.rail_lead_class) {
      rails.push_back(s.log);
    }
  }
  if (rails.empty()) throw std::runtime_error("stored runs contain no VIL Stopping rail source condition");

  std::optional<CorrelationResult> prediction;
  try {
    const Tables tables = tables_for(runs_from_storage(stored, ctx.config.analysis));
    prediction = tables.rows.front().prediction;
  } catch (const std::invalid_argument & e) {
    std::fprintf(stderr, "warning: %s\n", e.what());
  }

  const auto emit = [&](const SweepResult & r, const std::string & file) {
    for (const auto & w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    write_text_file(ctx.out_dir / "sweeps" / file, sweep_to_json(r).dump(2) + "\n");
    std::printf("wrote %zu %s points to %s\n", r.points.size(), std::string(to_string(r.kind)).c_str(),
                (ctx.out_dir / "sweeps" / file).string().c_str());
  };
  if (kind == "all" || kind == "FogLevel") emit(run_fog_sweep(ctx.config, rails, prediction, ctx.jobs), "fog_sweep.json");
  if (kind == "all" || kind == "SunAngle") emit(run_sun_sweep(ctx.config, rails, ctx.jobs), "sun_sweep.json");
  return 0;
}

std::pair<std::vector<SuiteRun>, Tables> analyze_stored(const Context & ctx)
{
  auto runs = runs_from_storage(require_runs(ctx.out_dir), ctx.config.analysis);
  Tables tables = tables_for(runs);
  return {std::move(runs), std::move(tables)};
}

int cmd_analyze(const Context & ctx)
{
  const auto [runs, tables] = analyze_stored(ctx);
  Json metrics = Json::array();
  for (const auto & r : runs) {
    Json m = metrics_to_json(r.metrics);
    m["run_id"] = r.run_id;
    m["terminal"] = to_string(r.log->terminal);
    metrics.push_back(m);
  }
  write_text_file(ctx.out_dir / "analysis" / "metrics.json", metrics.dump(2) + "\n");
  write_text_file(ctx.out_dir / "analysis" / "table.json", table_json(tables).dump(2) + "\n");
  for (const auto & row : tables.rows) {
    std::printf("%-9s %5s-%-6s diagnosis r=%+.3f p=%.3g n=%zu | prediction r=%+.3f p=%.3g n=%zu\n",
                std::string(to_string(row.driving_type)).c_str(), std::string(to_string(row.predictive)).c_str(),
                std::string(to_string(row.response)).c_str(), row.diagnosis.r, row.diagnosis.p_value,
                row.diagnosis.n, row.prediction.r, row.prediction.p_value, row.prediction.n);
  }
  return 0;
}

int cmd_report(const Context & ctx)
{
  const auto [runs, tables] = analyze_stored(ctx);
  for (const auto & path : emit_reports(ctx.out_dir / "report", runs, tables, ctx.out_dir / "sweeps")) {
    std::printf("wrote %s\n", path.string().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"tripleloop: closed-loop and replay simulation testbed"};
  app.require_subcommand(1, 1);
  Options opt;
  const auto common = [&](CLI::App * sub) {
    sub->add_option("--config", opt.config_path, "config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "override suite.base_seed");
    sub->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", opt.out, std::string("output directory (else $") + kOutEnv + ", else suite.output_dir)");
  };
  auto * run = app.add_subcommand("run", "run the experiment suite");
  auto * sweep = app.add_subcommand("sweep", "run parameter sweeps over stored rail sources");
  auto * analyze = app.add_subcommand("analyze", "compute metrics and tables from stored logs");
  auto * report = app.add_subcommand("report", "emit tables and plot data from stored logs");
  for (auto * sub : {run, sweep, analyze, report}) common(sub);
  sweep->add_option("--kind", opt.sweep_kind, "FogLevel, SunAngle or all")
    ->check(CLI::IsMember({"all", "FogLevel", "SunAngle"}));

  CLI11_PARSE(app, argc, argv);

  try {
    const Context ctx = make_context(opt);
    if (run->parsed()) return cmd_run(ctx);
    if (sweep->parsed()) return cmd_sweep(ctx, opt.sweep_kind);
    if (analyze->parsed()) return cmd_analyze(ctx);
    if (report->parsed()) return cmd_report(ctx);
  } catch (const std::exception & e) {
    std::fprintf(stderr, "tripleloop: %s\n", e.what());
    return 1;
  }
  return 1;
}
