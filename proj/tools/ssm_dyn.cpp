// Copyright 2026 The ssm-dyn Authors
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

// ssm-dyn command line: run scenarios, fit sweep CSVs, validate models.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ssmdyn/experiments.hpp"
#include "ssmdyn/sweep_io.hpp"

namespace {

using namespace ssmdyn;

void print_report(const ScenarioReport& report) {
  for (const auto& c : report.checks) {
    std::printf("[%s] %-44s value=%.6g bound=%.3g%s%s\n", c.passed ? "PASS" : "FAIL",
                c.name.c_str(), c.value, c.bound, c.detail.empty() ? "" : "  ",
                c.detail.c_str());
  }
  for (const auto& [k, v] : report.metrics) std::printf("  %-40s %.10g\n", k.c_str(), v);
  for (const auto& s : report.sweeps) {
    if (s.fit) {
      std::printf("  sweep %-34s slope=%.6f intercept=%.6f points=%d\n", s.label.c_str(),
                  s.fit->slope, s.fit->intercept, s.fit->points_used);
    } else {
      std::printf("  sweep %-34s no fit\n", s.label.c_str());
    }
  }
  for (const auto& n : report.notes) std::printf("  note: %s\n", n.c_str());
}

struct CommonArgs {
  std::string scenario;
  std::string config;
  std::string model;
  std::optional<double> t_min;
  std::optional<double> t_max;
  std::optional<int> t_points;
  bool full_scale = false;
};

ScenarioConfig make_config(const CommonArgs& a) {
  const Scenario s = parse_scenario(a.scenario);
  ScenarioConfig cfg = a.config.empty() ? ScenarioConfig::from_keyvalue(s, KeyValueFile{})
                                        : ScenarioConfig::from_file(s, a.config);
  if (a.t_min) cfg.t_min = *a.t_min;
  if (a.t_max) cfg.t_max = *a.t_max;
  if (a.t_points) cfg.t_points = *a.t_points;
  cfg.full_scale = a.full_scale;
  if (!a.model.empty()) cfg.model_file = a.model;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("scenario", a.scenario, "dfs4, ns3, spinboson, zeno, robustness, second_order, model")
      ->required()
      ->check(CLI::IsMember(scenario_names()));
  cmd->add_option("--config", a.config, "key-value parameter file")->check(CLI::ExistingFile);
  cmd->add_option("--model", a.model, "model file for the 'model' scenario")->check(CLI::ExistingFile);
  cmd->add_flag("--full-scale", a.full_scale, "spin-boson with 60 modes");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady-state manifold dynamics: projectors, effective generators, T sweeps"};
  app.set_version_flag("--version", ssmdyn::version());
  app.require_subcommand(1);

  CommonArgs run_args;
  std::string out_dir = "out";
  bool no_timing = false;
  unsigned threads = 0;
  auto* run = app.add_subcommand("run", "validate a scenario, sweep T and write outputs");
  add_common(run, run_args);
  run->add_option("--t-min", run_args.t_min, "smallest T");
  run->add_option("--t-max", run_args.t_max, "largest T");
  run->add_option("--t-points", run_args.t_points, "number of log-spaced T values");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--threads", threads, "worker threads (0: hardware)");
  run->add_flag("--no-timing", no_timing, "write wall_time as 0 for byte-reproducible files");

  CommonArgs validate_args;
  auto* validate = app.add_subcommand("validate", "model assertions only, no sweep");
  add_common(validate, validate_args);

  std::string csv;
  int points = 4;
  auto* fit = app.add_subcommand("fit", "log-log fit of distance against 1/T from a sweep CSV");
  fit->add_option("csv", csv, "sweep CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--points", points, "fit over this many largest-T points")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ScenarioConfig cfg = make_config(run_args);
      cfg.out_dir = out_dir;
      cfg.record_timing = !no_timing;
      if (threads != 0) cfg.threads = threads;
      const ScenarioReport report = run_scenario(cfg);
      print_report(report);
      for (const auto& p : write_outputs(report, cfg)) std::printf("wrote %s\n", p.string().c_str());
      return report.passed() ? 0 : 1;
    }
    if (*validate) {
      const ScenarioReport report = validate_scenario(make_config(validate_args));
      print_report(report);
      return report.passed() ? 0 : 1;
    }
    if (*fit) {
      const auto records = load_sweep_csv(csv);
      const FitResult f = loglog_fit(records, points);
      std::printf("slope=%.12g intercept=%.12g points=%d residual=%.3g\n", f.slope, f.intercept,
                  f.points_used, f.residual);
      for (const auto& w : f.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      return 0;
    }
  } catch (const ssmdyn::ModelError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
