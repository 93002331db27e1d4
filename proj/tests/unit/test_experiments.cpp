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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"
#include "ssmdyn/experiments.hpp"
#include "test_util.hpp"

namespace ssmdyn {
namespace {

using testing::max_abs;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ScenarioConfig config(Scenario s, const std::string& text = "") {
  return ScenarioConfig::from_keyvalue(s, KeyValueFile::parse(text));
}

TEST(SpinBoson, DarkStatesAtSeveralSizes) {
  for (int n_s : {2, 3, 5}) {
    for (int n_b : {4, 12}) {
      const SpinBosonModel sb = spin_boson_model(n_s, n_b);
      ASSERT_EQ(sb.dark_states.size(), static_cast<std::size_t>(n_s - 1));
      for (const auto& psi : sb.dark_states) {
        EXPECT_LT((sb.h0.matrix() * psi).norm(), 1e-10);
        EXPECT_NEAR(psi.norm(), 1.0, 1e-14);
      }
      EXPECT_NEAR(sb.phi.norm(), 1.0, 1e-12);
    }
  }
}

TEST(SpinBoson, AnalyticProjectionMatchesDirectProjection) {
  const SpinBosonModel sb = spin_boson_model(3, 6);
  Matrix dark = Matrix::Zero(sb.dim(), sb.dim());
  for (const auto& psi : sb.dark_states) dark += psi * psi.adjoint();
  const Matrix direct = dark * sb.h1.matrix() * dark;
  EXPECT_LT(max_abs(direct - spin_boson_analytic_projection(sb).matrix()), 1e-12);
}

TEST(SpinBoson, InvalidSizes) {
  EXPECT_THROW(spin_boson_model(1, 4), ModelError);
  EXPECT_THROW(spin_boson_model(3, 0), ModelError);
}

TEST(Robustness, PerturbationIsCommutantFreeAndSeeded) {
  const auto blocks = total_spin_blocks(SpinRegister(4));
  const Operator a = robustness_perturbation(blocks, 16, 3);
  const Operator b = robustness_perturbation(blocks, 16, 3);
  const Operator c = robustness_perturbation(blocks, 16, 4);
  EXPECT_EQ(max_abs(a.matrix() - b.matrix()), 0.0);
  EXPECT_GT(max_abs(a.matrix() - c.matrix()), 1e-3);
  EXPECT_LT(max_abs(commutant_projection(blocks, a).matrix()), 1e-10);
  EXPECT_TRUE(a.is_hermitian(1e-14));
  EXPECT_NEAR(svd_max(a.matrix()), 1.0, 1e-12);
}

TEST(Config, ParsesAndRejectsUnknownKeys) {
  const ScenarioConfig cfg = config(Scenario::dfs4, "theta = 0.5\nt_points = 6\n");
  EXPECT_EQ(cfg.t_points, 6);
  EXPECT_EQ(cfg.number("theta", 1.0), 0.5);
  EXPECT_EQ(cfg.grid().size(), 6u);
  EXPECT_THROW(config(Scenario::dfs4, "n_b = 3\n"), ModelError);
  EXPECT_THROW(config(Scenario::ns3, "t_min = 10\nt_max = 5\n"), ModelError);
  EXPECT_THROW(config(Scenario::ns3, "fit_points = 9\n"), ModelError);
  EXPECT_THROW(parse_scenario("nope"), ModelError);
  for (const auto& name : scenario_names()) EXPECT_EQ(scenario_name(parse_scenario(name)), name);
}

TEST(Scenarios, ValidateDoesNotSweep) {
  for (Scenario s : {Scenario::dfs4, Scenario::ns3, Scenario::spinboson, Scenario::zeno,
                     Scenario::robustness, Scenario::second_order}) {
    const ScenarioReport r = validate_scenario(config(s));
    EXPECT_TRUE(r.passed()) << scenario_name(s);
    EXPECT_TRUE(r.sweeps.empty());
  }
}

TEST(Scenarios, Ns3Report) {
  ScenarioConfig cfg = config(Scenario::ns3);
  cfg.record_timing = false;
  const ScenarioReport r = run_scenario(cfg);
  EXPECT_TRUE(r.passed());
  EXPECT_NEAR(*r.metric("ssm_trace"), 5.0, 1e-6);
  EXPECT_LT(*r.metric("max_steady_eigenvalue"), 1.0);
  ASSERT_NE(r.sweep("ns3"), nullptr);
  EXPECT_NEAR(r.sweep("ns3")->fit->slope, 1.0, 0.1);
  EXPECT_FALSE(r.metric("sweep_seconds").has_value());
}

TEST(Scenarios, SecondOrderReport) {
  const ScenarioReport r = run_scenario(config(Scenario::second_order));
  EXPECT_TRUE(r.passed());
  EXPECT_NEAR(*r.metric("tau_eff_over_tau_r") / *r.metric("tau_eff_over_tau_r_alt"), 4.0, 1e-8);
}

TEST(Scenarios, InvalidModelNeverSweeps) {
  // Non-unit Kraus weights are rejected before any sweep starts.
  const auto path = std::filesystem::temp_directory_path() / "ssmdyn_bad_model.txt";
  std::ofstream(path) << "sites = 1\nkraus = 0.5 : I\nperturbation = X1\n";
  ScenarioConfig cfg = config(Scenario::model);
  cfg.model_file = path;
  EXPECT_THROW(run_scenario(cfg), ModelError);
}

TEST(Outputs, ByteReproducibleWithManifest) {
  const auto base = std::filesystem::temp_directory_path() / "ssmdyn_outputs_test";
  std::filesystem::remove_all(base);
  ScenarioConfig cfg = config(Scenario::second_order);
  cfg.record_timing = false;
  cfg.out_dir = base / "a";
  const auto files_a = write_outputs(run_scenario(cfg), cfg);
  cfg.out_dir = base / "b";
  const auto files_b = write_outputs(run_scenario(cfg), cfg);
  ASSERT_EQ(files_a.size(), files_b.size());
  for (std::size_t i = 0; i < files_a.size(); ++i) {
    EXPECT_EQ(files_a[i].filename(), files_b[i].filename());
    EXPECT_EQ(slurp(files_a[i]), slurp(files_b[i])) << files_a[i];
  }
  const auto manifest = nlohmann::json::parse(slurp(base / "a" / "manifest.json"));
  EXPECT_EQ(manifest["scenario"], "second_order");
  for (const auto& f : manifest["files"]) {
    const std::string contents = slurp(base / "a" / f["path"].get<std::string>());
    EXPECT_EQ(f["bytes"].get<std::size_t>(), contents.size());
    EXPECT_EQ(f["sha256"].get<std::string>().size(), 64u);
  }
  EXPECT_TRUE(std::filesystem::exists(base / "a" / "second_order.csv"));
  EXPECT_TRUE(std::filesystem::exists(base / "a" / "report.json"));
  std::filesystem::remove_all(base);
}

}  // namespace
}  // namespace ssmdyn
