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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssmdyn/evolution.hpp"
#include "ssmdyn/keyvalue.hpp"
#include "ssmdyn/liouville.hpp"
#include "ssmdyn/spin_ops.hpp"
#include "ssmdyn/ssm_projection.hpp"

/// Worked scenarios: model builders, their assertions, sweeps and output.
namespace ssmdyn {

// ---- model builders -------------------------------------------------------

/// Four spins under collective dissipation sum_a gamma_a D[S^a], perturbed by
/// the DFS gate Hamiltonian H^gate with strength theta.
LiouvillianModel dfs4_model(Axis gate, double gamma_x = 1.0, double gamma_y = 1.0,
                            double gamma_z = 1.0, double theta = 1.0);

/// Three spins under the channel (1/3) sum_a U_a . U_a^H, U_a = exp(i phi_a S^a),
/// as L0 = Phi - id; perturbation sigma_1^x sigma_2^x with strength theta.
LiouvillianModel ns3_model(double phi_x = 1.0, double phi_y = 1.0, double phi_z = 1.0,
                           double theta = 1.0);

/// Collective dephasing D[S^z] on n spins with no perturbation.
LiouvillianModel zeno_model(int n_sites = 3, double gamma = 1.0);

/// One qubit, gamma D[sigma^z], perturbation sigma^x with the given strength.
LiouvillianModel second_order_model(double strength = 1.0, double gamma = 1.0);

/// Single-excitation sector of N_S two-level sites coupled to N_B modes.
///
/// Basis order: |x>_S |0>_B for x = 1..N_S, then |down>_S |n>_B for
/// n = 1..N_B. H0 has mode energies omega_n = 2 pi n / N_B and a uniform
/// coupling g between every site state and every mode. H1 is sigma_1^z
/// restricted to the sector: +1 on |1>_S|0>_B and -1 elsewhere.
struct SpinBosonModel {
  int n_s = 0;
  int n_b = 0;
  double coupling = 0.0;
  Operator h0;
  Operator h1;
  /// |psi_q> = N_S^{-1/2} sum_x exp(+2 pi i q x / N_S) |x>, q = 1..N_S-1.
  std::vector<Vector> dark_states;
  /// (N_S - 1)^{-1/2} sum_q exp(-2 pi i q / N_S) |psi_q>.
  Vector phi;

  Index dim() const { return h0.dim(); }
};

SpinBosonModel spin_boson_model(int n_s = 3, int n_b = 60, double coupling = 0.045);

/// theta [2 (N_S - 1) / N_S |phi><phi| - Pi_dark], the projected H1 on the
/// dark manifold written in the full sector.
Operator spin_boson_analytic_projection(const SpinBosonModel& sb, double theta = 1.0);

/// Random Hermitian K' on the register with its commutant part removed:
/// K'_0 - commutant_projection(blocks, K'_0), scaled to unit spectral norm.
/// Deterministic in `seed`.
Operator robustness_perturbation(std::span<const AlgebraBlock> blocks, Index dim,
                                 std::uint64_t seed);

/// 1 / min |Re lambda| over the nonzero eigenvalues of a generator.
double relaxation_time_of(const SuperOperator& generator, double tol = 1e-9);

// ---- scenarios -------------------------------------------------------------

enum class Scenario { dfs4, ns3, spinboson, zeno, robustness, second_order, model };

Scenario parse_scenario(const std::string& name);
std::string scenario_name(Scenario s);
std::vector<std::string> scenario_names();

/// Run configuration. Parameters come from a key-value file; the command
/// line overrides the grid, output directory and scale flags.
///
/// Common keys: t_min, t_max, t_points, fit_points, threads, seed.
/// dfs4: gamma_x, gamma_y, gamma_z, theta. ns3: phi_x, phi_y, phi_z, theta.
/// spinboson: n_s, n_b, coupling, theta. robustness: theta, theta_prime,
/// gate, seed. zeno: n_sites, samples, seed. second_order: strength,
/// strength_alt, gamma. model: model (path to a model file).
struct ScenarioConfig {
  Scenario scenario = Scenario::dfs4;
  KeyValueFile parameters;
  double t_min = 1e2;
  double t_max = 1e5;
  int t_points = 8;
  int fit_points = 4;
  unsigned threads = 0;
  std::filesystem::path out_dir = "out";
  /// Full-size spin-boson (N_B = 60) instead of the default N_B = 12.
  bool full_scale = false;
  bool record_timing = true;
  std::optional<std::filesystem::path> model_file;

  static ScenarioConfig from_file(Scenario s, const std::filesystem::path& path);
  static ScenarioConfig from_keyvalue(Scenario s, KeyValueFile kv);

  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::vector<double> grid() const;
  /// Throws ModelError for unknown keys or out-of-range values.
  void validate() const;
};

struct Check {
  std::string name;
  bool passed = false;
  /// Measured quantity and the bound it was compared with.
  double value = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct LabelledSweep {
  std::string label;
  PerturbationScaling scaling = PerturbationScaling::inverse;
  std::vector<SweepRecord> records;
  std::optional<FitResult> fit;
};

struct ScenarioReport {
  Scenario scenario = Scenario::dfs4;
  std::vector<Check> checks;
  std::vector<LabelledSweep> sweeps;
  /// Named scalar results (SSM dimension, gate errors, timings, ...).
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> notes;

  bool passed() const;
  std::optional<double> metric(const std::string& name) const;
  const LabelledSweep* sweep(const std::string& label) const;
};

/// Model-level assertions only. Never sweeps.
ScenarioReport validate_scenario(const ScenarioConfig& cfg);

/// Assertions, then sweeps. Throws ModelError if an assertion that guards
/// the model fails, so no sweep ever runs on an invalid model.
ScenarioReport run_scenario(const ScenarioConfig& cfg);

/// Writes <label>.csv and <label>.json per sweep, report.json and
/// manifest.json (config, versions, SHA-256 of every file) under out_dir.
/// Returns the files written, manifest last.
std::vector<std::filesystem::path> write_outputs(const ScenarioReport& report,
                                                 const ScenarioConfig& cfg);

std::string report_json(const ScenarioReport& report);

/// Library version string.
std::string version();

}  // namespace ssmdyn
