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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssmdyn/liouville.hpp"
#include "ssmdyn/ssm_projection.hpp"
#include "ssmdyn/tensor.hpp"

/// Full and effective propagation, distance sweeps in T, and log-log fits.
///
/// Norms are spectral norms (largest singular value) of the maps realised as
/// d^2 x d^2 matrices. The effective map exp(K_eff) is evolved for unit
/// rescaled time: the generator carries the strength theta, never T.
namespace ssmdyn {

struct SweepRecord {
  double t_scale = 0.0;
  /// ||E_T P0 - exp(K_eff) P0||
  double distance = 0.0;
  /// ||Q0 E_T P0||
  double leakage = 0.0;
  /// ||P - P0|| for the lambda-group projector P of L_T.
  std::optional<double> projector_drift;
  double wall_time = 0.0;
  /// Set when this grid point failed; numeric fields are then NaN.
  std::optional<std::string> error;

  bool ok() const { return !error.has_value(); }
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  int points_used = 0;
  /// RMS residual of the fit in log space.
  double residual = 0.0;
  std::vector<std::string> warnings;
};

/// exp(t L_T). Requires t >= 0.
SuperOperator propagate(const SuperOperator& l_t, double t);

/// exp(-i t h), from the spectral decomposition of the Hermitian h.
Matrix unitary_propagator(const Operator& h, double t);

/// Superoperator of X -> U X U^H with U = exp(-i t h): conj(U) (x) U.
/// Costs O(d^3) for U plus the Kronecker product, instead of exponentiating
/// the d^2 x d^2 generator.
SuperOperator propagate_unitary_lift(const Operator& h, double t);

/// Distance and leakage at scale T. `target_generator` is the unit-time
/// effective generator (P0 K~ P0 for the first-order regime).
SweepRecord theorem_distance(const SuperOperator& l_t, const SsmData& ssm,
                             const SuperOperator& target_generator, double t_scale);

/// P0 + t P0 K P0 + (exp(t L0) - 1) S K P0, with K the perturbation already
/// scaled by 1/T.
SuperOperator dyson_first_order(const SuperOperator& l0, const SsmData& ssm,
                                const SuperOperator& k, double t);

enum class PerturbationScaling {
  /// L = L0 + K~ / T, target exp(P0 K~ P0).
  inverse,
  /// L = L0 + K~ / sqrt(T), target exp(-P0 K~ S K~ P0). Requires P0 K~ P0 = 0.
  inverse_sqrt,
};

struct SweepOptions {
  PerturbationScaling scaling = PerturbationScaling::inverse;
  bool projector_drift = false;
  /// Worker threads; 0 picks min(hardware threads, grid size).
  unsigned threads = 0;
  /// When false, wall_time is written as 0 so outputs are byte-reproducible.
  bool record_timing = true;
  /// Enforce min(T) >= regime_factor * tau_R when tau_R is defined.
  bool check_operating_regime = true;
  double regime_factor = 10.0;
};

/// Everything a sweep needs that does not depend on T.
struct SweepProblem {
  SuperOperator l0;
  /// theta * (-i[K~, .]).
  SuperOperator k_tilde;
  SsmData ssm;
  PerturbationScaling scaling = PerturbationScaling::inverse;
  SuperOperator target_generator;
  /// exp(target_generator) P0.
  SuperOperator target_map;

  /// L0 + K~ / T or L0 + K~ / sqrt(T).
  SuperOperator generator_at(double t_scale) const;
};

SweepProblem prepare_sweep(const SuperOperator& l0, const SuperOperator& k_tilde,
                           PerturbationScaling scaling = PerturbationScaling::inverse);
SweepProblem prepare_sweep(const LiouvillianModel& model,
                           PerturbationScaling scaling = PerturbationScaling::inverse);

/// One record per grid point, in grid order. Points run in parallel; a
/// failing point is recorded and the sweep continues. Throws ModelError when
/// the grid is not positive and ascending or violates the operating regime.
std::vector<SweepRecord> run_sweep(const SweepProblem& problem, std::span<const double> grid,
                                   const SweepOptions& options = {});
std::vector<SweepRecord> run_sweep(const LiouvillianModel& model, std::span<const double> grid,
                                   const SweepOptions& options = {});

/// Sweep for a closed system L0 = -i[H0, .] with perturbation K~ (including
/// theta). Works on an orthonormal basis of ker L0 instead of d^2 x d^2
/// superoperators, so cost is O(rank * d^3) per point.
std::vector<SweepRecord> run_hamiltonian_sweep(const Operator& h0, const Operator& k_tilde,
                                               std::span<const double> grid,
                                               const SweepOptions& options = {});

struct DriftRecord {
  double t_scale = 0.0;
  /// ||P - P0||
  double drift = 0.0;
  /// ||(P - P0) + (P0 K~ S + S K~ P0) / T||
  double first_order_residual = 0.0;
};

std::vector<DriftRecord> projector_drift_sweep(const SweepProblem& problem,
                                               std::span<const double> grid);

/// `points` log-spaced values from t_min to t_max inclusive.
std::vector<double> log_grid(double t_min, double t_max, int points);

/// Default grid: 8 points over [1e2, 1e5].
std::vector<double> default_grid();

/// Least squares of log(distance) against log(1/T) over the n_points
/// largest T. Non-positive or failed points are skipped with a warning.
FitResult loglog_fit(std::span<const SweepRecord> records, int n_points);
FitResult loglog_fit(std::span<const double> t_scale, std::span<const double> values, int n_points);

}  // namespace ssmdyn
