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

#include "ssmdyn/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "json.hpp"
#include "ssmdyn/model_file.hpp"
#include "ssmdyn/sweep_io.hpp"

namespace ssmdyn {

namespace {

constexpr const char* kVersion = "0.1.0";

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Matrix random_complex(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = cplx(normal(rng), normal(rng));
  }
  return m;
}

void add_check(ScenarioReport& r, std::string name, bool passed, double value, double bound,
               std::string detail = {}) {
  r.checks.push_back({std::move(name), passed, value, bound, std::move(detail)});
}

void check_at_most(ScenarioReport& r, std::string name, double value, double bound) {
  add_check(r, std::move(name), value <= bound, value, bound);
}

void check_band(ScenarioReport& r, std::string name, double value, double target, double tol) {
  std::ostringstream d;
  d << "target " << target << " +/- " << tol;
  add_check(r, std::move(name), std::abs(value - target) <= tol, value, tol, d.str());
}

void metric(ScenarioReport& r, std::string name, double value) {
  r.metrics.emplace_back(std::move(name), value);
}

void timing_metric(ScenarioReport& r, const ScenarioConfig& cfg, std::string name, double value) {
  if (cfg.record_timing) metric(r, std::move(name), value);
}

std::vector<double> column(std::span<const SweepRecord> records, double SweepRecord::*field) {
  std::vector<double> out;
  for (const auto& rec : records) out.push_back(rec.*field);
  return out;
}

std::vector<double> t_values(std::span<const SweepRecord> records) {
  return column(records, &SweepRecord::t_scale);
}

/// (max - min) / max of leakage * T over the upper half of the grid.
double leakage_variation(std::span<const SweepRecord> records) {
  const std::size_t start = records.size() / 2;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = start; i < records.size(); ++i) {
    const double v = records[i].leakage * records[i].t_scale;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi > 0.0 ? (hi - lo) / hi : std::numeric_limits<double>::infinity();
}

bool strictly_decreasing(std::span<const SweepRecord> records) {
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (!(records[i].distance < records[i - 1].distance)) return false;
  }
  return true;
}

/// 4x4 matrix of a map restricted to the logical qubit: x -> B^H M(B x B^H) B.
Matrix logical_channel(const Matrix& map, const LogicalQubit& lq) {
  const Index d = lq.basis.rows();
  Matrix out(4, 4);
  for (Index j = 0; j < 2; ++j) {
    for (Index i = 0; i < 2; ++i) {
      Matrix e = Matrix::Zero(2, 2);
      e(i, j) = 1.0;
      const Vector image = map * vec(lq.embed(e));
      out.col(i + 2 * j) = vec(lq.compress(unvec(image, d)));
    }
  }
  return out;
}

Matrix unitary_channel(const Matrix& u) {
  return kron(u.conjugate(), u);
}

SweepOptions sweep_options(const ScenarioConfig& cfg) {
  SweepOptions o;
  o.threads = cfg.threads;
  o.record_timing = cfg.record_timing;
  return o;
}

LabelledSweep labelled(std::string label, std::vector<SweepRecord> records, int fit_points,
                       PerturbationScaling scaling = PerturbationScaling::inverse) {
  LabelledSweep s;
  s.label = std::move(label);
  s.scaling = scaling;
  s.records = std::move(records);
  try {
    s.fit = loglog_fit(s.records, fit_points);
  } catch (const ModelError&) {
    s.fit.reset();
  }
  return s;
}

double fitted_slope(const LabelledSweep& s) {
  return s.fit ? s.fit->slope : std::numeric_limits<double>::quiet_NaN();
}

void require_valid(const ScenarioReport& r) {
  std::ostringstream msg;
  bool ok = true;
  for (const auto& c : r.checks) {
    if (!c.passed) {
      ok = false;
      msg << "\n  " << c.name << ": value " << c.value << ", bound " << c.bound;
      if (!c.detail.empty()) msg << " (" << c.detail << ")";
    }
  }
  if (!ok) {
    throw ModelError("scenario " + scenario_name(r.scenario) +
                     ": model assertions failed, sweep not run:" + msg.str());
  }
}

// ---- dfs4 -----------------------------------------------------------------

ScenarioReport scenario_dfs4(const ScenarioConfig& cfg, bool sweep) {
  ScenarioReport r;
  r.scenario = Scenario::dfs4;
  const double gx = cfg.number("gamma_x", 1.0);
  const double gy = cfg.number("gamma_y", 1.0);
  const double gz = cfg.number("gamma_z", 1.0);
  const double theta = cfg.number("theta", 1.0);
  const SpinRegister reg(4);

  const auto start = std::chrono::steady_clock::now();
  const LiouvillianModel mx = dfs4_model(Axis::x, gx, gy, gz, theta);
  const LiouvillianModel mz = dfs4_model(Axis::z, gx, gy, gz, theta);
  const AssembledModel ax = assemble(mx);
  const AssembledModel az = assemble(mz);
  const SsmData ssm = kernel_projector(ax.l0);
  const double trace = ssm.p0.matrix().trace().real();
  timing_metric(r, cfg, "kernel_projector_seconds", seconds_since(start));
  metric(r, "ssm_trace", trace);
  metric(r, "ssm_dim", static_cast<double>(ssm.ssm_dim));
  if (ssm.tau_r) metric(r, "tau_r", *ssm.tau_r);
  check_at_most(r, "ssm_dimension_14", std::abs(trace - 14.0), 1e-6);

  const LogicalQubit lq = logical_basis_j0(reg);
  const Matrix hx = lq.compress(dfs_gate_hamiltonian(reg, Axis::x).matrix());
  const Matrix hz = lq.compress(dfs_gate_hamiltonian(reg, Axis::z).matrix());
  check_at_most(r, "gate_identity_x", svd_max(hx - pauli(Axis::x)), 1e-10);
  check_at_most(r, "gate_identity_z", svd_max(hz - pauli(Axis::z)), 1e-10);

  // The effective map must realise u = exp(-i theta sigma) on the code.
  const Matrix ux = expm(-kI * theta * pauli(Axis::x));
  const Matrix uz = expm(-kI * theta * pauli(Axis::z));
  const Matrix eff_x = expm(effective_generator(ssm, ax.k_superop).matrix()) * ssm.p0.matrix();
  const Matrix eff_z = expm(effective_generator(ssm, az.k_superop).matrix()) * ssm.p0.matrix();
  check_at_most(r, "effective_gate_x",
                svd_max(logical_channel(eff_x, lq) - unitary_channel(ux)), 1e-9);
  check_at_most(r, "effective_gate_z",
                svd_max(logical_channel(eff_z, lq) - unitary_channel(uz)), 1e-9);
  if (!sweep) return r;
  require_valid(r);

  const auto grid = cfg.grid();
  SweepOptions opts = sweep_options(cfg);
  opts.projector_drift = true;
  const auto sweep_start = std::chrono::steady_clock::now();
  const SweepProblem px = prepare_sweep(ax.l0, ax.k_superop);
  r.sweeps.push_back(labelled("dfs4_x", run_sweep(px, grid, opts), cfg.fit_points));
  timing_metric(r, cfg, "sweep_x_seconds", seconds_since(sweep_start));
  const auto sweep_z_start = std::chrono::steady_clock::now();
  const SweepProblem pz = prepare_sweep(az.l0, az.k_superop);
  r.sweeps.push_back(labelled("dfs4_z", run_sweep(pz, grid, opts), cfg.fit_points));
  timing_metric(r, cfg, "sweep_z_seconds", seconds_since(sweep_z_start));

  for (const auto& s : r.sweeps) {
    check_band(r, s.label + "_slope", fitted_slope(s), 1.0, 0.1);
    add_check(r, s.label + "_monotone", strictly_decreasing(s.records), 0.0, 0.0,
              "distance strictly decreasing in T");
    check_at_most(r, s.label + "_leakage_variation", leakage_variation(s.records), 0.2);
    std::vector<double> drift;
    for (const auto& rec : s.records) drift.push_back(rec.projector_drift.value_or(NAN));
    check_band(r, s.label + "_projector_drift_slope",
               loglog_fit(t_values(s.records), drift, cfg.fit_points).slope, 1.0, 0.1);
  }
  const auto drift = projector_drift_sweep(px, grid);
  std::vector<double> dt, residual;
  for (const auto& d : drift) {
    dt.push_back(d.t_scale);
    residual.push_back(d.first_order_residual);
  }
  const double residual_slope = loglog_fit(dt, residual, cfg.fit_points).slope;
  metric(r, "projector_first_order_residual_slope", residual_slope);
  add_check(r, "projector_first_order_residual_slope", residual_slope >= 1.8, residual_slope, 1.8,
            "slope >= 1.8");

  // Finite-T gate errors and concatenation x then z.
  const Matrix uzx = unitary_channel(uz * ux);
  std::vector<double> concat;
  for (double t : grid) {
    const Matrix ex = propagate(px.generator_at(t), t).matrix();
    const Matrix ez = propagate(pz.generator_at(t), t).matrix();
    const Matrix cx = logical_channel(ex, lq);
    const Matrix cz = logical_channel(ez, lq);
    concat.push_back(svd_max(logical_channel(ez * ex, lq) - uzx));
    if (t == grid.back()) {
      metric(r, "gate_x_error_tmax", svd_max(cx - unitary_channel(ux)));
      metric(r, "gate_z_error_tmax", svd_max(cz - unitary_channel(uz)));
      metric(r, "gate_x_fidelity_tmax",
             (unitary_channel(ux).adjoint() * cx).trace().real() / 4.0);
      metric(r, "gate_z_fidelity_tmax",
             (unitary_channel(uz).adjoint() * cz).trace().real() / 4.0);
    }
  }
  const double concat_slope = loglog_fit(grid, concat, cfg.fit_points).slope;
  metric(r, "concatenation_error_tmax", concat.back());
  metric(r, "concatenation_slope", concat_slope);
  check_band(r, "concatenation_slope", concat_slope, 1.0, 0.1);
  return r;
}

// ---- ns3 ------------------------------------------------------------------

ScenarioReport scenario_ns3(const ScenarioConfig& cfg, bool sweep) {
  ScenarioReport r;
  r.scenario = Scenario::ns3;
  const LiouvillianModel m = ns3_model(cfg.number("phi_x", 1.0), cfg.number("phi_y", 1.0),
                                       cfg.number("phi_z", 1.0), cfg.number("theta", 1.0));
  const auto start = std::chrono::steady_clock::now();
  const AssembledModel a = assemble(m);
  const SsmData ssm = kernel_projector(a.l0);
  const double trace = ssm.p0.matrix().trace().real();
  timing_metric(r, cfg, "kernel_projector_seconds", seconds_since(start));
  metric(r, "ssm_trace", trace);
  metric(r, "ssm_dim", static_cast<double>(ssm.ssm_dim));
  if (ssm.tau_r) metric(r, "tau_r", *ssm.tau_r);
  check_at_most(r, "ssm_dimension_5", std::abs(trace - 5.0), 1e-6);

  // P0 maps states to steady states; scan basis and random pure inputs.
  std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.integer("seed", 7)));
  const Index d = m.dim;
  double max_eig = 0.0;
  double trace_err = 0.0;
  const long samples = cfg.integer("samples", 64);
  for (long s = 0; s < d + samples; ++s) {
    Vector psi = Vector::Zero(d);
    if (s < d) {
      psi(s) = 1.0;
    } else {
      psi = random_complex(d, 1, rng).col(0);
      psi.normalize();
    }
    const Matrix rho = ssm.p0.apply(Operator(Matrix(psi * psi.adjoint()))).matrix();
    const Matrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
    max_eig = std::max(max_eig, es.eigenvalues().maxCoeff());
    trace_err = std::max(trace_err, std::abs(rho.trace() - 1.0));
  }
  metric(r, "max_steady_eigenvalue", max_eig);
  check_at_most(r, "steady_trace_preserved", trace_err, 1e-8);
  add_check(r, "no_pure_steady_states", max_eig < 1.0 - 1e-6, max_eig, 1.0,
            "largest eigenvalue over scanned steady states");
  if (!sweep) return r;
  require_valid(r);

  const auto sweep_start = std::chrono::steady_clock::now();
  const SweepProblem p = prepare_sweep(a.l0, a.k_superop);
  r.sweeps.push_back(labelled("ns3", run_sweep(p, cfg.grid(), sweep_options(cfg)), cfg.fit_points));
  timing_metric(r, cfg, "sweep_seconds", seconds_since(sweep_start));
  check_band(r, "ns3_slope", fitted_slope(r.sweeps.back()), 1.0, 0.1);
  add_check(r, "ns3_monotone", strictly_decreasing(r.sweeps.back().records), 0.0, 0.0,
            "distance strictly decreasing in T");
  return r;
}

// ---- spin-boson -----------------------------------------------------------

ScenarioReport scenario_spinboson(const ScenarioConfig& cfg, bool sweep) {
  ScenarioReport r;
  r.scenario = Scenario::spinboson;
  const int n_s = static_cast<int>(cfg.integer("n_s", 3));
  const int n_b = cfg.full_scale ? 60 : static_cast<int>(cfg.integer("n_b", 12));
  const double theta = cfg.number("theta", 1.0);
  const auto start = std::chrono::steady_clock::now();
  const SpinBosonModel sb = spin_boson_model(n_s, n_b, cfg.number("coupling", 0.045));
  metric(r, "n_s", n_s);
  metric(r, "n_b", n_b);

  double dark_residual = 0.0;
  for (const auto& psi : sb.dark_states) {
    dark_residual = std::max(dark_residual, (sb.h0.matrix() * psi).norm());
  }
  check_at_most(r, "dark_states_annihilated", dark_residual, 1e-10);

  const EnergyPinching pinching(sb.h0);
  metric(r, "bohr_gap", pinching.gap());
  metric(r, "kernel_rank", static_cast<double>(pinching.rank()));
  const Matrix& zero_space = pinching.eigenspace_near(0.0);
  Matrix dark_projector = Matrix::Zero(sb.dim(), sb.dim());
  for (const auto& psi : sb.dark_states) dark_projector += psi * psi.adjoint();
  const Matrix numeric_projector = zero_space * zero_space.adjoint();
  check_at_most(r, "dark_manifold_is_zero_eigenspace", svd_max(numeric_projector - dark_projector),
                1e-8);
  const Matrix projected =
      numeric_projector * pinching.apply(theta * sb.h1).matrix() * numeric_projector;
  const Matrix analytic = spin_boson_analytic_projection(sb, theta).matrix();
  const double analytic_err = svd_max(projected - analytic);
  metric(r, "analytic_projection_error", analytic_err);
  check_at_most(r, "analytic_projected_hamiltonian", analytic_err, 1e-8);
  timing_metric(r, cfg, "validation_seconds", seconds_since(start));
  if (!sweep) return r;
  require_valid(r);

  const auto sweep_start = std::chrono::steady_clock::now();
  auto records = run_hamiltonian_sweep(sb.h0, theta * sb.h1, cfg.grid(), sweep_options(cfg));
  r.sweeps.push_back(labelled("spinboson_nb" + std::to_string(n_b), std::move(records),
                              cfg.fit_points));
  timing_metric(r, cfg, "sweep_seconds", seconds_since(sweep_start));
  check_band(r, r.sweeps.back().label + "_slope", fitted_slope(r.sweeps.back()), 1.0, 0.1);
  r.notes.push_back(
      "closed system: no relaxation time, the operating-regime check does not apply");
  return r;
}

// ---- robustness -----------------------------------------------------------

ScenarioReport scenario_robustness(const ScenarioConfig& cfg, bool sweep) {
  ScenarioReport r;
  r.scenario = Scenario::robustness;
  const double theta = cfg.number("theta", 1.0);
  const double theta_prime = cfg.number("theta_prime", theta);
  const std::string gate = cfg.text("gate", "x");
  if (gate != "x" && gate != "z") throw ModelError("robustness: gate must be x or z");
  const Axis axis = gate == "x" ? Axis::x : Axis::z;
  const auto seed = static_cast<std::uint64_t>(cfg.integer("seed", 20260416));
  const SpinRegister reg(4);
  const auto blocks = total_spin_blocks(reg);

  const LiouvillianModel base = dfs4_model(axis, 1.0, 1.0, 1.0, theta);
  const Operator k_prime = robustness_perturbation(blocks, reg.hilbert_dim(), seed);
  LiouvillianModel perturbed = base;
  perturbed.perturbation = base.perturbation + (theta_prime / theta) * k_prime;
  metric(r, "theta_prime", theta_prime);

  const AssembledModel ab = assemble(base);
  const AssembledModel ap = assemble(perturbed);
  const SsmData ssm = kernel_projector(ab.l0);
  check_at_most(r, "commutant_part_removed", svd_max(commutant_projection(blocks, k_prime).matrix()),
                1e-10);
  check_at_most(r, "kernel_part_removed", svd_max(ssm.p0.apply(k_prime).matrix()), 1e-10);
  const Matrix kp = hamiltonian_superop(k_prime).matrix();
  check_at_most(r, "no_effective_contribution",
                svd_max(ssm.p0.matrix() * kp * ssm.p0.matrix()), 1e-10);
  if (!sweep) return r;
  require_valid(r);

  const auto grid = cfg.grid();
  SweepProblem pb = prepare_sweep(ab.l0, ab.k_superop);
  SweepProblem pp = prepare_sweep(ap.l0, ap.k_superop);
  // The limiting gate is the unperturbed one.
  pp.target_generator = pb.target_generator;
  pp.target_map = pb.target_map;
  auto perturbed_records = run_sweep(pp, grid, sweep_options(cfg));

  std::vector<SweepRecord> paired;
  for (double t : grid) {
    SweepRecord rec;
    rec.t_scale = t;
    const auto point_start = std::chrono::steady_clock::now();
    const Matrix ep = propagate(pp.generator_at(t), t).matrix() * ssm.p0.matrix();
    const Matrix eb = propagate(pb.generator_at(t), t).matrix() * ssm.p0.matrix();
    rec.distance = svd_max(ep - eb);
    rec.leakage = svd_max(ssm.q0.matrix() * ep);
    rec.wall_time = cfg.record_timing ? seconds_since(point_start) : 0.0;
    paired.push_back(rec);
  }
  r.sweeps.push_back(labelled("robustness_perturbed", std::move(perturbed_records), cfg.fit_points));
  r.sweeps.push_back(labelled("robustness_paired", std::move(paired), cfg.fit_points));
  check_band(r, "perturbed_slope", fitted_slope(r.sweeps[0]), 1.0, 0.1);
  const double paired_slope = fitted_slope(r.sweeps[1]);
  add_check(r, "paired_slope", paired_slope >= 1.0, paired_slope, 1.0, "slope >= 1");

  // theta' = 0 must reproduce the unperturbed sweep exactly.
  LiouvillianModel zero = base;
  zero.perturbation = base.perturbation + 0.0 * k_prime;
  const AssembledModel az = assemble(zero);
  const double reduce_err = (az.l0.matrix() - ab.l0.matrix()).cwiseAbs().maxCoeff() +
                            (az.k_superop.matrix() - ab.k_superop.matrix()).cwiseAbs().maxCoeff();
  check_at_most(r, "zero_strength_reduces_to_dfs4", reduce_err, 0.0);
  return r;
}

// ---- zeno -----------------------------------------------------------------

ScenarioReport scenario_zeno(const ScenarioConfig& cfg) {
  ScenarioReport r;
  r.scenario = Scenario::zeno;
  const int n = static_cast<int>(cfg.integer("n_sites", 3));
  const long samples = cfg.integer("samples", 8);
  std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.integer("seed", 11)));
  const SpinRegister reg(n);
  const LiouvillianModel m = zeno_model(n);
  const SsmData ssm = kernel_projector(assemble(m).l0);
  const auto blocks = eigenspace_blocks(collective_spin(reg, Axis::z));
  metric(r, "blocks", static_cast<double>(blocks.size()));

  auto pinch = [&](const Matrix& k) {
    Matrix out = Matrix::Zero(k.rows(), k.cols());
    for (const auto& b : blocks) out += b.projector() * k * b.projector();
    return out;
  };
  double commutant_err = 0.0;
  double kernel_err = 0.0;
  double offdiag = 0.0;
  for (long s = 0; s < samples; ++s) {
    const Matrix k = random_complex(reg.hilbert_dim(), reg.hilbert_dim(), rng);
    const Matrix p = pinch(k);
    commutant_err = std::max(commutant_err, svd_max(commutant_projection(blocks, Operator(k)).matrix() - p));
    kernel_err = std::max(kernel_err, svd_max(ssm.p0.apply(Operator(k)).matrix() - p));
    for (std::size_t a = 0; a < blocks.size(); ++a) {
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (a == b) continue;
        const Matrix block = blocks[a].projector() * k * blocks[b].projector();
        offdiag = std::max(offdiag, svd_max(commutant_projection(blocks, Operator(block)).matrix()));
      }
    }
  }
  check_at_most(r, "commutant_equals_pinching", commutant_err, 1e-10);
  check_at_most(r, "kernel_projector_equals_pinching", kernel_err, 1e-10);
  check_at_most(r, "offdiagonal_blocks_annihilated", offdiag, 1e-10);

  const Eigen::SelfAdjointEigenSolver<Matrix> es(collective_spin(reg, Axis::z).matrix());
  const Matrix v = es.eigenvectors();
  const Matrix diag = v * random_complex(v.cols(), 1, rng).col(0).asDiagonal() * v.adjoint();
  check_at_most(r, "diagonal_unchanged",
                svd_max(commutant_projection(blocks, Operator(diag)).matrix() - diag), 1e-10);
  return r;
}

// ---- second order ---------------------------------------------------------

ScenarioReport scenario_second_order(const ScenarioConfig& cfg, bool sweep) {
  ScenarioReport r;
  r.scenario = Scenario::second_order;
  const double s1 = cfg.number("strength", 1.0);
  const double s2 = cfg.number("strength_alt", 2.0);
  const double gamma = cfg.number("gamma", 1.0);

  struct Point {
    double tau_r, tau_eff, k_norm;
  };
  auto analyse = [&](double strength, double g) {
    const AssembledModel a = assemble(second_order_model(strength, g));
    const SsmData ssm = kernel_projector(a.l0);
    const auto second = second_order_generator(ssm, a.k_superop);
    return std::pair{Point{ssm.tau_r.value_or(NAN), relaxation_time_of(second.generator),
                           svd_max(a.k_superop.matrix())},
                     second.first_order_norm};
  };
  const auto [p1, first_norm] = analyse(s1, gamma);
  const auto [p2, unused] = analyse(s2, gamma);
  const auto [p3, unused_g] = analyse(s1, 2.0 * gamma);
  check_at_most(r, "first_order_vanishes", first_norm, 1e-10);
  const double ratio1 = p1.tau_eff / p1.tau_r;
  const double ratio2 = p2.tau_eff / p2.tau_r;
  metric(r, "tau_r", p1.tau_r);
  metric(r, "tau_eff", p1.tau_eff);
  metric(r, "tau_eff_over_tau_r", ratio1);
  metric(r, "tau_eff_over_tau_r_alt", ratio2);
  // ratio * (tau_R ||K||)^2 is the same at both strengths.
  const double c1 = ratio1 * std::pow(p1.tau_r * p1.k_norm, 2);
  const double c2 = ratio2 * std::pow(p2.tau_r * p2.k_norm, 2);
  check_at_most(r, "tau_ratio_inverse_square_law", std::abs(c1 - c2) / std::abs(c1), 1e-8);
  add_check(r, "stronger_dissipation_slower_effective", p3.tau_eff > p1.tau_eff, p3.tau_eff,
            p1.tau_eff, "tau_eff at doubled gamma exceeds tau_eff at gamma");
  if (!sweep) return r;
  require_valid(r);

  const AssembledModel a = assemble(second_order_model(s1, gamma));
  const SweepProblem p = prepare_sweep(a.l0, a.k_superop, PerturbationScaling::inverse_sqrt);
  SweepOptions opts = sweep_options(cfg);
  opts.scaling = PerturbationScaling::inverse_sqrt;
  r.sweeps.push_back(labelled("second_order", run_sweep(p, cfg.grid(), opts), cfg.fit_points,
                              PerturbationScaling::inverse_sqrt));
  check_band(r, "second_order_slope", fitted_slope(r.sweeps.back()), 0.5, 0.1);
  return r;
}

// ---- model file -----------------------------------------------------------

ScenarioReport scenario_model(const ScenarioConfig& cfg, bool sweep) {
  ScenarioReport r;
  r.scenario = Scenario::model;
  std::filesystem::path path;
  if (cfg.model_file) {
    path = *cfg.model_file;
  } else if (auto p = cfg.parameters.get("model")) {
    path = *p;
  } else {
    throw ModelError("model scenario needs a model file");
  }
  const LiouvillianModel m = load_model(path);
  const AssembledModel a = assemble(m);
  const SsmData ssm = kernel_projector(a.l0);
  metric(r, "ssm_trace", ssm.p0.matrix().trace().real());
  metric(r, "ssm_dim", static_cast<double>(ssm.ssm_dim));
  if (ssm.tau_r) metric(r, "tau_r", *ssm.tau_r);
  for (const auto& w : ssm.warnings) r.notes.push_back(w);
  add_check(r, "nontrivial_kernel", ssm.ssm_dim > 0, static_cast<double>(ssm.ssm_dim), 1.0);
  if (!sweep) return r;
  require_valid(r);
  const SweepProblem p = prepare_sweep(a.l0, a.k_superop);
  r.sweeps.push_back(labelled(path.stem().string(), run_sweep(p, cfg.grid(), sweep_options(cfg)),
                              cfg.fit_points));
  if (r.sweeps.back().fit) metric(r, "slope", r.sweeps.back().fit->slope);
  return r;
}

ScenarioReport dispatch(const ScenarioConfig& cfg, bool sweep) {
  cfg.validate();
  switch (cfg.scenario) {
    case Scenario::dfs4: return scenario_dfs4(cfg, sweep);
    case Scenario::ns3: return scenario_ns3(cfg, sweep);
    case Scenario::spinboson: return scenario_spinboson(cfg, sweep);
    case Scenario::zeno: return scenario_zeno(cfg);
    case Scenario::robustness: return scenario_robustness(cfg, sweep);
    case Scenario::second_order: return scenario_second_order(cfg, sweep);
    case Scenario::model: return scenario_model(cfg, sweep);
  }
  throw ModelError("unknown scenario");
}

const std::set<std::string>& allowed_keys(Scenario s) {
  static const std::set<std::string> common = {"t_min", "t_max", "t_points", "fit_points",
                                               "threads", "seed"};
  static const std::map<Scenario, std::set<std::string>> extra = {
      {Scenario::dfs4, {"gamma_x", "gamma_y", "gamma_z", "theta"}},
      {Scenario::ns3, {"phi_x", "phi_y", "phi_z", "theta", "samples"}},
      {Scenario::spinboson, {"n_s", "n_b", "coupling", "theta"}},
      {Scenario::robustness, {"theta", "theta_prime", "gate"}},
      {Scenario::zeno, {"n_sites", "samples"}},
      {Scenario::second_order, {"strength", "strength_alt", "gamma"}},
      {Scenario::model, {"model"}},
  };
  static std::map<Scenario, std::set<std::string>> merged;
  auto& out = merged[s];
  if (out.empty()) {
    out = common;
    out.insert(extra.at(s).begin(), extra.at(s).end());
  }
  return out;
}

}  // namespace

// ---- model builders -------------------------------------------------------

LiouvillianModel dfs4_model(Axis gate, double gamma_x, double gamma_y, double gamma_z,
                            double theta) {
  const SpinRegister reg(4);
  LiouvillianModel m;
  m.dim = reg.hilbert_dim();
  const std::pair<Axis, double> rates[] = {{Axis::x, gamma_x}, {Axis::y, gamma_y}, {Axis::z, gamma_z}};
  for (const auto& [axis, rate] : rates) {
    if (rate < 0.0) throw ModelError("dfs4_model: rates must be nonnegative");
    if (rate > 0.0) m.lindblad_terms.push_back({collective_spin(reg, axis), rate});
  }
  m.perturbation = dfs_gate_hamiltonian(reg, gate);
  m.strength = theta;
  return m;
}

LiouvillianModel ns3_model(double phi_x, double phi_y, double phi_z, double theta) {
  const SpinRegister reg(3);
  LiouvillianModel m;
  m.dim = reg.hilbert_dim();
  const std::pair<Axis, double> phases[] = {{Axis::x, phi_x}, {Axis::y, phi_y}, {Axis::z, phi_z}};
  for (const auto& [axis, phi] : phases) {
    const Matrix u = expm(kI * phi * collective_spin(reg, axis).matrix());
    m.kraus_terms.push_back({Operator(u), 1.0 / 3.0});
  }
  m.perturbation = site_pauli(reg, 1, Axis::x) * site_pauli(reg, 2, Axis::x);
  m.strength = theta;
  return m;
}

LiouvillianModel zeno_model(int n_sites, double gamma) {
  const SpinRegister reg(n_sites);
  LiouvillianModel m;
  m.dim = reg.hilbert_dim();
  m.lindblad_terms.push_back({collective_spin(reg, Axis::z), gamma});
  m.perturbation = Operator::zero(m.dim);
  return m;
}

LiouvillianModel second_order_model(double strength, double gamma) {
  const SpinRegister reg(1);
  LiouvillianModel m;
  m.dim = 2;
  m.lindblad_terms.push_back({site_pauli(reg, 1, Axis::z), gamma});
  m.perturbation = site_pauli(reg, 1, Axis::x);
  m.strength = strength;
  return m;
}

SpinBosonModel spin_boson_model(int n_s, int n_b, double coupling) {
  if (n_s < 2) throw ModelError("spin_boson_model: need N_S >= 2");
  if (n_b < 1) throw ModelError("spin_boson_model: need N_B >= 1");
  SpinBosonModel sb;
  sb.n_s = n_s;
  sb.n_b = n_b;
  sb.coupling = coupling;
  const Index d = n_s + n_b;
  Matrix h0 = Matrix::Zero(d, d);
  for (int n = 1; n <= n_b; ++n) {
    const Index k = n_s + n - 1;
    h0(k, k) = 2.0 * std::numbers::pi * n / n_b;
    for (Index x = 0; x < n_s; ++x) {
      h0(x, k) = coupling;
      h0(k, x) = coupling;
    }
  }
  Matrix h1 = -Matrix::Identity(d, d);
  h1(0, 0) = 1.0;
  sb.h0 = Operator(std::move(h0));
  sb.h1 = Operator(std::move(h1));

  sb.phi = Vector::Zero(d);
  for (int q = 1; q < n_s; ++q) {
    Vector psi = Vector::Zero(d);
    for (int x = 1; x <= n_s; ++x) {
      psi(x - 1) = std::exp(kI * (2.0 * std::numbers::pi * q * x / n_s)) / std::sqrt(double(n_s));
    }
    sb.phi += std::exp(-kI * (2.0 * std::numbers::pi * q / n_s)) * psi;
    sb.dark_states.push_back(std::move(psi));
  }
  sb.phi /= std::sqrt(double(n_s - 1));
  return sb;
}

Operator spin_boson_analytic_projection(const SpinBosonModel& sb, double theta) {
  Matrix dark = Matrix::Zero(sb.dim(), sb.dim());
  for (const auto& psi : sb.dark_states) dark += psi * psi.adjoint();
  const double w = 2.0 * (sb.n_s - 1) / sb.n_s;
  return Operator(Matrix(theta * (w * sb.phi * sb.phi.adjoint() - dark)));
}

Operator robustness_perturbation(std::span<const AlgebraBlock> blocks, Index dim,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Matrix g = random_complex(dim, dim, rng);
  const Operator k0(Matrix(0.5 * (g + g.adjoint())));
  const Operator k = k0 - commutant_projection(blocks, k0);
  const double norm = svd_max(k.matrix());
  if (!(norm > 1e-8)) throw ModelError("robustness_perturbation: projection-free part vanishes");
  Matrix herm = k.matrix() / norm;
  herm = 0.5 * (herm + herm.adjoint());
  return Operator(std::move(herm));
}

double relaxation_time_of(const SuperOperator& generator, double tol) {
  const Eigen::ComplexEigenSolver<Matrix> es(generator.matrix(), false);
  if (es.info() != Eigen::Success) throw NumericalError("relaxation_time_of: eigensolver failed");
  const double cut = tol * std::max(1.0, superop_scale(generator));
  double rate = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const cplx l = es.eigenvalues()(i);
    if (std::abs(l) > cut && std::abs(l.real()) > cut) rate = std::min(rate, std::abs(l.real()));
  }
  if (!std::isfinite(rate)) throw NumericalError("relaxation_time_of: no decaying eigenvalue");
  return 1.0 / rate;
}

// ---- scenarios -------------------------------------------------------------

Scenario parse_scenario(const std::string& name) {
  static const std::map<std::string, Scenario> table = {
      {"dfs4", Scenario::dfs4},           {"ns3", Scenario::ns3},
      {"spinboson", Scenario::spinboson}, {"zeno", Scenario::zeno},
      {"robustness", Scenario::robustness}, {"second_order", Scenario::second_order},
      {"model", Scenario::model}};
  const auto it = table.find(name);
  if (it == table.end()) throw ModelError("unknown scenario '" + name + "'");
  return it->second;
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::dfs4: return "dfs4";
    case Scenario::ns3: return "ns3";
    case Scenario::spinboson: return "spinboson";
    case Scenario::zeno: return "zeno";
    case Scenario::robustness: return "robustness";
    case Scenario::second_order: return "second_order";
    case Scenario::model: return "model";
  }
  return "unknown";
}

std::vector<std::string> scenario_names() {
  return {"dfs4", "ns3", "spinboson", "zeno", "robustness", "second_order", "model"};
}

ScenarioConfig ScenarioConfig::from_file(Scenario s, const std::filesystem::path& path) {
  return from_keyvalue(s, KeyValueFile::load(path));
}

ScenarioConfig ScenarioConfig::from_keyvalue(Scenario s, KeyValueFile kv) {
  ScenarioConfig cfg;
  cfg.scenario = s;
  cfg.parameters = std::move(kv);
  cfg.t_min = cfg.number("t_min", cfg.t_min);
  cfg.t_max = cfg.number("t_max", cfg.t_max);
  cfg.t_points = static_cast<int>(cfg.integer("t_points", cfg.t_points));
  cfg.fit_points = static_cast<int>(cfg.integer("fit_points", cfg.fit_points));
  cfg.threads = static_cast<unsigned>(cfg.integer("threads", cfg.threads));
  if (auto m = cfg.parameters.get("model")) cfg.model_file = *m;
  cfg.validate();
  return cfg;
}

double ScenarioConfig::number(const std::string& key, double fallback) const {
  return parameters.get_double(key).value_or(fallback);
}

long ScenarioConfig::integer(const std::string& key, long fallback) const {
  return parameters.get_int(key).value_or(fallback);
}

std::string ScenarioConfig::text(const std::string& key, const std::string& fallback) const {
  return parameters.get(key).value_or(fallback);
}

std::vector<double> ScenarioConfig::grid() const {
  return log_grid(t_min, t_max, t_points);
}

void ScenarioConfig::validate() const {
  const auto& allowed = allowed_keys(scenario);
  for (const auto& e : parameters.entries()) {
    if (!allowed.contains(e.key)) {
      std::ostringstream msg;
      msg << parameters.source() << ":" << e.line << ": key '" << e.key
          << "' is not a parameter of scenario " << scenario_name(scenario);
      throw ModelError(msg.str());
    }
  }
  if (!(t_min > 0.0) || !(t_max > t_min)) throw ModelError("config: need 0 < t_min < t_max");
  if (t_points < 2) throw ModelError("config: t_points must be at least 2");
  if (fit_points < 2 || fit_points > t_points) {
    throw ModelError("config: fit_points must lie in [2, t_points]");
  }
}

bool ScenarioReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::optional<double> ScenarioReport::metric(const std::string& name) const {
  for (const auto& [k, v] : metrics) {
    if (k == name) return v;
  }
  return std::nullopt;
}

const LabelledSweep* ScenarioReport::sweep(const std::string& label) const {
  for (const auto& s : sweeps) {
    if (s.label == label) return &s;
  }
  return nullptr;
}

ScenarioReport validate_scenario(const ScenarioConfig& cfg) {
  return dispatch(cfg, false);
}

ScenarioReport run_scenario(const ScenarioConfig& cfg) {
  return dispatch(cfg, true);
}

std::string report_json(const ScenarioReport& report) {
  auto finite = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nullptr; };
  nlohmann::ordered_json j;
  j["schema"] = "ssm-dyn/report";
  j["schema_version"] = 1;
  j["scenario"] = scenario_name(report.scenario);
  j["passed"] = report.passed();
  auto& checks = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"value", finite(c.value)},
                      {"bound", finite(c.bound)},
                      {"detail", c.detail}});
  }
  auto& metrics = j["metrics"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.metrics) metrics[k] = finite(v);
  auto& sweeps = j["sweeps"] = nlohmann::ordered_json::array();
  for (const auto& s : report.sweeps) {
    nlohmann::ordered_json e;
    e["label"] = s.label;
    e["points"] = s.records.size();
    e["slope"] = s.fit ? finite(s.fit->slope) : nullptr;
    e["intercept"] = s.fit ? finite(s.fit->intercept) : nullptr;
    sweeps.push_back(std::move(e));
  }
  j["notes"] = report.notes;
  return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> write_outputs(const ScenarioReport& report,
                                                 const ScenarioConfig& cfg) {
  std::vector<std::filesystem::path> written;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  auto emit = [&](const std::string& name, const std::string& contents) {
    const auto path = cfg.out_dir / name;
    write_file_atomic(path, contents);
    written.push_back(path);
    files.push_back({{"path", name}, {"bytes", contents.size()}, {"sha256", sha256_hex(contents)}});
  };

  std::map<std::string, std::string> params;
  for (const auto& e : cfg.parameters.entries()) params[e.key] = e.value;
  for (const auto& s : report.sweeps) {
    SweepMetadata meta;
    meta.scenario = scenario_name(report.scenario);
    meta.label = s.label;
    meta.scaling = s.scaling;
    meta.parameters = params;
    meta.fit = s.fit;
    emit(s.label + ".csv", sweep_csv(s.records));
    emit(s.label + ".json", sweep_json(s.records, meta));
  }
  emit("report.json", report_json(report));

  nlohmann::ordered_json manifest;
  manifest["schema"] = "ssm-dyn/manifest";
  manifest["schema_version"] = 1;
  manifest["scenario"] = scenario_name(report.scenario);
  nlohmann::ordered_json config;
  config["parameters"] = params;
  config["t_min"] = cfg.t_min;
  config["t_max"] = cfg.t_max;
  config["t_points"] = cfg.t_points;
  config["fit_points"] = cfg.fit_points;
  config["full_scale"] = cfg.full_scale;
  config["record_timing"] = cfg.record_timing;
  config["model_file"] = cfg.model_file ? nlohmann::ordered_json(cfg.model_file->string()) : nullptr;
  manifest["config"] = config;
  std::ostringstream eigen;
  eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
  manifest["versions"] = {{"ssm-dyn", kVersion},
                          {"eigen", eigen.str()},
                          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                          {"compiler", __VERSION__}};
  manifest["files"] = files;
  const auto path = cfg.out_dir / "manifest.json";
  write_file_atomic(path, manifest.dump(2) + "\n");
  written.push_back(path);
  return written;
}

std::string version() {
  return kVersion;
}

}  // namespace ssmdyn
