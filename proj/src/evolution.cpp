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

#include "ssmdyn/evolution.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

namespace ssmdyn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_grid(std::span<const double> grid) {
  if (grid.empty()) throw ModelError("sweep grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) {
      throw ModelError("sweep grid values must be positive and finite");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw ModelError("sweep grid must be strictly ascending");
    }
  }
}

// Runs body(i) for i in [0, n) on a small pool; results are written by index
// so the merge order is independent of scheduling.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
}

template <class Compute>
SweepRecord timed_point(double t_scale, bool record_timing, Compute&& compute) {
  const auto start = std::chrono::steady_clock::now();
  SweepRecord rec;
  try {
    rec = compute();
  } catch (const std::exception& e) {
    rec = SweepRecord{};
    rec.distance = kNaN;
    rec.leakage = kNaN;
    rec.error = e.what();
  }
  rec.t_scale = t_scale;
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  rec.wall_time = record_timing ? elapsed.count() : 0.0;
  return rec;
}

}  // namespace

SuperOperator propagate(const SuperOperator& l_t, double t) {
  if (!(t >= 0.0)) throw ModelError("propagate: t must be nonnegative");
  return SuperOperator(expm(t * l_t.matrix()));
}

Matrix unitary_propagator(const Operator& h, double t) {
  if (!h.is_hermitian(1e-12)) throw ModelError("unitary_propagator: h must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) throw NumericalError("unitary_propagator: eigensolver failed");
  const Matrix& v = solver.eigenvectors();
  Vector phases(v.cols());
  for (Index i = 0; i < phases.size(); ++i) {
    phases(i) = std::exp(-kI * (t * solver.eigenvalues()(i)));
  }
  return v * phases.asDiagonal() * v.adjoint();
}

SuperOperator propagate_unitary_lift(const Operator& h, double t) {
  const Matrix u = unitary_propagator(h, t);
  return SuperOperator(kron(u.conjugate(), u));
}

SweepRecord theorem_distance(const SuperOperator& l_t, const SsmData& ssm,
                             const SuperOperator& target_generator, double t_scale) {
  const Matrix evolved = propagate(l_t, t_scale).matrix() * ssm.p0.matrix();
  const Matrix target = expm(target_generator.matrix()) * ssm.p0.matrix();
  SweepRecord rec;
  rec.t_scale = t_scale;
  rec.distance = svd_max(evolved - target);
  rec.leakage = svd_max(ssm.q0.matrix() * evolved);
  return rec;
}

SuperOperator dyson_first_order(const SuperOperator& l0, const SsmData& ssm,
                                const SuperOperator& k, double t) {
  if (!(t >= 0.0)) throw ModelError("dyson_first_order: t must be nonnegative");
  const Index n = l0.size();
  const Matrix& p0 = ssm.p0.matrix();
  const Matrix kp0 = k.matrix() * p0;
  Matrix out = p0 + t * (p0 * kp0);
  out += (expm(t * l0.matrix()) - Matrix::Identity(n, n)) * (ssm.resolvent.matrix() * kp0);
  return SuperOperator(std::move(out));
}

SuperOperator SweepProblem::generator_at(double t_scale) const {
  const double factor = scaling == PerturbationScaling::inverse ? 1.0 / t_scale
                                                                : 1.0 / std::sqrt(t_scale);
  return l0 + factor * k_tilde;
}

SweepProblem prepare_sweep(const SuperOperator& l0, const SuperOperator& k_tilde,
                           PerturbationScaling scaling) {
  if (l0.size() != k_tilde.size()) throw ModelError("prepare_sweep: dimension mismatch");
  SweepProblem p;
  p.l0 = l0;
  p.k_tilde = k_tilde;
  p.ssm = kernel_projector(l0);
  p.scaling = scaling;
  if (scaling == PerturbationScaling::inverse) {
    p.target_generator = effective_generator(p.ssm, k_tilde);
  } else {
    auto second = second_order_generator(p.ssm, k_tilde);
    if (second.warning) {
      throw ModelError("prepare_sweep: second-order scaling requires P0 K P0 = 0; " +
                       *second.warning);
    }
    p.target_generator = std::move(second.generator);
  }
  p.target_map = SuperOperator(Matrix(expm(p.target_generator.matrix()) * p.ssm.p0.matrix()));
  return p;
}

SweepProblem prepare_sweep(const LiouvillianModel& model, PerturbationScaling scaling) {
  const AssembledModel a = assemble(model);
  return prepare_sweep(a.l0, a.k_superop, scaling);
}

std::vector<SweepRecord> run_sweep(const SweepProblem& problem, std::span<const double> grid,
                                   const SweepOptions& options) {
  validate_grid(grid);
  if (options.check_operating_regime && problem.ssm.tau_r &&
      grid.front() < options.regime_factor * *problem.ssm.tau_r) {
    std::ostringstream msg;
    msg << "run_sweep: min T = " << grid.front() << " violates T >= " << options.regime_factor
        << " tau_R = " << options.regime_factor * *problem.ssm.tau_r;
    throw ModelError(msg.str());
  }
  const Matrix& p0 = problem.ssm.p0.matrix();
  const Matrix& q0 = problem.ssm.q0.matrix();
  const Matrix& target = problem.target_map.matrix();

  std::vector<SweepRecord> out(grid.size());
  parallel_for(grid.size(), options.threads, [&](std::size_t i) {
    const double t = grid[i];
    out[i] = timed_point(t, options.record_timing, [&] {
      const SuperOperator l_t = problem.generator_at(t);
      const Matrix evolved = propagate(l_t, t).matrix() * p0;
      SweepRecord rec;
      rec.distance = svd_max(evolved - target);
      rec.leakage = svd_max(q0 * evolved);
      if (options.projector_drift) {
        const SuperOperator p = lambda_group_projector(l_t, problem.ssm.ssm_dim);
        rec.projector_drift = svd_max(p.matrix() - p0);
      }
      return rec;
    });
  });
  return out;
}

std::vector<SweepRecord> run_sweep(const LiouvillianModel& model, std::span<const double> grid,
                                   const SweepOptions& options) {
  return run_sweep(prepare_sweep(model, options.scaling), grid, options);
}

std::vector<SweepRecord> run_hamiltonian_sweep(const Operator& h0, const Operator& k_tilde,
                                               std::span<const double> grid,
                                               const SweepOptions& options) {
  validate_grid(grid);
  if (options.scaling != PerturbationScaling::inverse) {
    throw ModelError("run_hamiltonian_sweep: only 1/T scaling is supported");
  }
  if (h0.dim() != k_tilde.dim()) throw ModelError("run_hamiltonian_sweep: dimension mismatch");
  const EnergyPinching pinching(h0);
  const std::vector<Matrix> basis = pinching.kernel_basis();
  // On range(P0) the effective generator is -i[pinch(K~), .].
  const Matrix v = unitary_propagator(pinching.apply(k_tilde), 1.0);
  const Index d = h0.dim();
  const auto r = static_cast<Index>(basis.size());

  std::vector<SweepRecord> out(grid.size());
  parallel_for(grid.size(), options.threads, [&](std::size_t i) {
    const double t = grid[i];
    out[i] = timed_point(t, options.record_timing, [&] {
      const Operator total(Matrix(t * h0.matrix() + k_tilde.matrix()));
      const Matrix u = unitary_propagator(total, 1.0);
      Matrix diff(d * d, r);
      Matrix leak(d * d, r);
      for (Index k = 0; k < r; ++k) {
        const Matrix& b = basis[static_cast<std::size_t>(k)];
        const Matrix evolved = u * b * u.adjoint();
        diff.col(k) = vec(evolved - v * b * v.adjoint());
        leak.col(k) = vec(evolved - pinching.apply(Operator(evolved)).matrix());
      }
      SweepRecord rec;
      rec.distance = svd_max(diff);
      rec.leakage = svd_max(leak);
      return rec;
    });
  });
  return out;
}

std::vector<DriftRecord> projector_drift_sweep(const SweepProblem& problem,
                                               std::span<const double> grid) {
  validate_grid(grid);
  if (problem.scaling != PerturbationScaling::inverse) {
    throw ModelError("projector_drift_sweep: defined for 1/T scaling");
  }
  const Matrix& p0 = problem.ssm.p0.matrix();
  std::vector<DriftRecord> out;
  out.reserve(grid.size());
  for (double t : grid) {
    const SuperOperator p = lambda_group_projector(problem.generator_at(t), problem.ssm.ssm_dim);
    const Matrix shift = p.matrix() - p0;
    const Matrix predicted = first_order_projector_shift(problem.ssm, problem.k_tilde, t).matrix();
    out.push_back({t, svd_max(shift), svd_max(shift - predicted)});
  }
  return out;
}

std::vector<double> log_grid(double t_min, double t_max, int points) {
  if (!(t_min > 0.0) || !(t_max > t_min) || points < 2) {
    throw ModelError("log_grid: need 0 < t_min < t_max and at least 2 points");
  }
  std::vector<double> out(static_cast<std::size_t>(points));
  const double a = std::log10(t_min);
  const double b = std::log10(t_max);
  for (int i = 0; i < points; ++i) {
    out[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (points - 1));
  }
  out.front() = t_min;
  out.back() = t_max;
  return out;
}

std::vector<double> default_grid() {
  return log_grid(1e2, 1e5, 8);
}

FitResult loglog_fit(std::span<const double> t_scale, std::span<const double> values, int n_points) {
  if (t_scale.size() != values.size()) throw ModelError("loglog_fit: length mismatch");
  if (n_points < 2) throw ModelError("loglog_fit: need at least 2 points");
  if (static_cast<std::size_t>(n_points) > t_scale.size()) {
    throw ModelError("loglog_fit: more fit points requested than records available");
  }
  FitResult fit;
  std::vector<std::pair<double, double>> usable;
  for (std::size_t i = 0; i < t_scale.size(); ++i) {
    if (std::isfinite(values[i]) && values[i] > 0.0 && t_scale[i] > 0.0) {
      usable.emplace_back(t_scale[i], values[i]);
    } else {
      std::ostringstream msg;
      msg << "excluded point T = " << t_scale[i] << " with value " << values[i];
      fit.warnings.push_back(msg.str());
    }
  }
  std::sort(usable.begin(), usable.end());
  const std::size_t take = std::min<std::size_t>(usable.size(), static_cast<std::size_t>(n_points));
  if (take < 2) throw ModelError("loglog_fit: fewer than 2 usable points");
  if (take < static_cast<std::size_t>(n_points)) {
    fit.warnings.push_back("fewer usable points than requested");
  }
  const auto first = usable.end() - static_cast<std::ptrdiff_t>(take);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (auto it = first; it != usable.end(); ++it) {
    const double x = -std::log(it->first);
    const double y = std::log(it->second);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(take);
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) throw ModelError("loglog_fit: degenerate abscissae");
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (auto it = first; it != usable.end(); ++it) {
    const double r = std::log(it->second) - (fit.intercept + fit.slope * -std::log(it->first));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.points_used = static_cast<int>(take);
  return fit;
}

FitResult loglog_fit(std::span<const SweepRecord> records, int n_points) {
  std::vector<double> t;
  std::vector<double> d;
  for (const auto& r : records) {
    t.push_back(r.t_scale);
    d.push_back(r.ok() ? r.distance : kNaN);
  }
  return loglog_fit(t, d, n_points);
}

}  // namespace ssmdyn
