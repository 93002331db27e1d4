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

#include "ssmdyn/ssm_projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ssmdyn/liouville.hpp"
#include "ssmdyn/schur.hpp"

namespace ssmdyn {

namespace {

constexpr double kSylvesterLimit = 1e12;
constexpr double kNilpotentRel = 1e-8;

double scale_of(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

// ---------------------------------------------------------------------------
// kernel projector

SsmData kernel_projector(const SuperOperator& l0, std::optional<double> cluster_tol) {
  const Matrix& m = l0.matrix();
  const Index n = m.rows();
  const double norm = scale_of(m);
  const double tol = cluster_tol.value_or(1e-9 * norm);

  SchurForm schur = complex_schur(m);
  const Vector w = schur.eigenvalues();
  std::vector<bool> select(n);
  double gap = std::numeric_limits<double>::infinity();
  std::optional<double> min_re;
  for (Index i = 0; i < n; ++i) {
    const double a = std::abs(w(i));
    select[i] = a <= tol;
    if (select[i]) continue;
    gap = std::min(gap, a);
    const double re = std::abs(w(i).real());
    if (re > tol) min_re = std::min(min_re.value_or(re), re);
  }
  if (std::isfinite(gap) && gap <= 10.0 * tol) {
    std::ostringstream msg;
    msg << "kernel_projector: eigenvalue at distance " << gap
        << " from 0 is not separated from the kernel cluster (tol " << tol << ")";
    throw NumericalError(msg.str());
  }

  const Index lead = reorder_schur(schur, select);
  const InvariantSplit split = split_leading_block(schur, lead);

  SsmData out;
  out.ssm_dim = lead;
  out.cluster_tol = tol;
  out.gap = std::isfinite(gap) ? gap : 0.0;
  out.sylvester_norm = split.y.norm();
  if (out.sylvester_norm > kSylvesterLimit) {
    throw NumericalError("kernel_projector: Sylvester decoupling is ill-conditioned (||Y|| = " +
                         std::to_string(out.sylvester_norm) + ")");
  }
  if (min_re) out.tau_r = 1.0 / *min_re;

  const Index rest = n - lead;
  Matrix inner = Matrix::Zero(n, n);
  if (rest > 0) {
    const Matrix t22 = schur.t.bottomRightCorner(rest, rest);
    const Matrix t22_inv =
        t22.triangularView<Eigen::Upper>().solve(Matrix::Identity(rest, rest));
    inner.bottomRightCorner(rest, rest) = t22_inv;
    if (lead > 0) inner.topRightCorner(lead, rest) = split.y * t22_inv;
  }
  out.p0 = SuperOperator(split.projector);
  out.q0 = SuperOperator::identity(l0.dim()) - out.p0;
  out.resolvent = SuperOperator(Matrix(schur.q * inner * schur.q.adjoint()));

  out.nilpotent_norm = (m * split.projector).norm();
  if (out.nilpotent_norm > kNilpotentRel * std::max(norm, 1e-300)) {
    std::ostringstream msg;
    msg << "nilpotent block at lambda = 0 (||L0 P0|| = " << out.nilpotent_norm
        << "); O(1/T) bounds assume it is absent";
    out.warnings.push_back(msg.str());
  }
  return out;
}

SuperOperator kernel_projector_by_evolution(const SuperOperator& l0, double tau_r) {
  if (!(tau_r > 0.0)) throw ModelError("kernel_projector_by_evolution: tau_r must be positive");
  return SuperOperator(expm(50.0 * tau_r * l0.matrix()));
}

// ---------------------------------------------------------------------------
// spectral resolution

std::size_t SpectralResolution::nearest(cplx value) const {
  if (clusters.empty()) throw ModelError("SpectralResolution is empty");
  std::size_t best = 0;
  for (std::size_t j = 1; j < clusters.size(); ++j) {
    if (std::abs(clusters[j].center - value) < std::abs(clusters[best].center - value)) best = j;
  }
  return best;
}

SpectralResolution spectral_resolution(const SuperOperator& l0, double cluster_tol) {
  const Matrix& m = l0.matrix();
  const Index n = m.rows();
  const double norm = scale_of(m);
  const double tol = cluster_tol > 0.0 ? cluster_tol : 1e-6 * norm;

  const SchurForm base = complex_schur(m);
  const Vector w = base.eigenvalues();

  // Single-linkage clustering via union-find.
  std::vector<Index> parent(n);
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (std::abs(w(i) - w(j)) <= tol) parent[find(i)] = find(j);
    }
  }
  std::vector<Index> roots;
  for (Index i = 0; i < n; ++i) {
    if (std::find(roots.begin(), roots.end(), find(i)) == roots.end()) roots.push_back(find(i));
  }

  SpectralResolution res;
  const Matrix id = Matrix::Identity(n, n);
  for (Index root : roots) {
    std::vector<bool> select(n);
    cplx sum = 0.0;
    Index count = 0;
    for (Index i = 0; i < n; ++i) {
      select[i] = find(i) == root;
      if (select[i]) {
        sum += w(i);
        ++count;
      }
    }
    SchurForm s = base;
    const Index lead = reorder_schur(s, select);
    const InvariantSplit split = split_leading_block(s, lead);
    if (split.y.norm() > kSylvesterLimit) {
      throw NumericalError("spectral_resolution: ill-conditioned cluster decoupling");
    }
    SpectralCluster c;
    c.center = sum / static_cast<double>(count);
    c.multiplicity = count;
    c.projector = SuperOperator(split.projector);
    Matrix d = (m - c.center * id) * split.projector;
    if (d.norm() <= kNilpotentRel * std::max(norm, 1e-300)) d.setZero();
    c.nilpotent = SuperOperator(std::move(d));
    res.clusters.push_back(std::move(c));
  }
  // Deterministic order: by modulus, then by real part.
  std::sort(res.clusters.begin(), res.clusters.end(), [](const auto& a, const auto& b) {
    if (std::abs(a.center) != std::abs(b.center)) return std::abs(a.center) < std::abs(b.center);
    return a.center.real() > b.center.real();
  });
  return res;
}

SuperOperator reduced_resolvent(const SpectralResolution& res, std::size_t at_cluster) {
  if (at_cluster >= res.clusters.size()) throw ModelError("reduced_resolvent: bad cluster index");
  const auto& target = res.clusters[at_cluster];
  const Index d = target.projector.dim();
  Matrix s = Matrix::Zero(d * d, d * d);
  for (std::size_t j = 0; j < res.clusters.size(); ++j) {
    if (j == at_cluster) continue;
    const auto& c = res.clusters[j];
    const cplx mu = c.center - target.center;
    if (mu == cplx(0.0)) throw NumericalError("reduced_resolvent: coincident cluster centers");
    const cplx neg = -mu;
    Matrix term = c.projector.matrix() / neg;
    if (c.nilpotent.matrix().norm() > 0.0) {
      Matrix power = c.nilpotent.matrix();
      cplx coeff = 1.0 / (neg * neg);
      for (Index k = 1; k < c.multiplicity; ++k) {
        if (power.norm() == 0.0) break;
        term += coeff * power;
        power = power * c.nilpotent.matrix();
        coeff /= neg;
      }
    }
    s -= term;
  }
  return SuperOperator(std::move(s));
}

// ---------------------------------------------------------------------------
// effective generators

SuperOperator effective_generator(const SsmData& ssm, const SuperOperator& k) {
  return ssm.p0 * k * ssm.p0;
}

Operator commutant_projection(std::span<const AlgebraBlock> blocks, const Operator& x) {
  if (blocks.empty()) throw ModelError("commutant_projection: empty block list");
  const Index dim = x.dim();
  Matrix resolution = Matrix::Zero(dim, dim);
  for (const auto& b : blocks) {
    if (b.isometry.rows() != dim || b.isometry.cols() != b.multiplicity * b.block_dim) {
      throw ModelError("commutant_projection: block isometry has the wrong shape");
    }
    resolution += b.isometry * b.isometry.adjoint();
  }
  if ((resolution - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-8) {
    throw ModelError("commutant_projection: blocks do not form a complete decomposition");
  }

  Matrix out = Matrix::Zero(dim, dim);
  for (const auto& b : blocks) {
    const Index n = b.multiplicity;
    const Index d = b.block_dim;
    const Matrix inner = b.isometry.adjoint() * x.matrix() * b.isometry;
    Matrix reduced = Matrix::Zero(n, n);
    for (Index a = 0; a < n; ++a) {
      for (Index c = 0; c < n; ++c) {
        cplx acc = 0.0;
        for (Index mm = 0; mm < d; ++mm) acc += inner(a * d + mm, c * d + mm);
        reduced(a, c) = acc;
      }
    }
    const Matrix symmetrized = kron(reduced, Matrix::Identity(d, d)) / static_cast<double>(d);
    out += b.isometry * symmetrized * b.isometry.adjoint();
  }
  return Operator(std::move(out));
}

SecondOrderGenerator second_order_generator(const SsmData& ssm, const SuperOperator& k) {
  SecondOrderGenerator out;
  out.first_order_norm = (ssm.p0 * k * ssm.p0).matrix().norm();
  const double ref = std::max(1.0, k.matrix().norm());
  if (out.first_order_norm > 1e-8 * ref) {
    std::ostringstream msg;
    msg << "P0 K P0 is not negligible (||P0 K P0|| = " << out.first_order_norm
        << "); the second-order generator is not the leading term";
    out.warning = msg.str();
  }
  out.generator = -1.0 * (ssm.p0 * k * ssm.resolvent * k * ssm.p0);
  return out;
}

SuperOperator lambda_group_projector(const SuperOperator& l_t, Index ssm_dim) {
  const Index n = l_t.size();
  if (ssm_dim < 0 || ssm_dim > n) throw ModelError("lambda_group_projector: bad ssm_dim");
  if (ssm_dim == 0) return SuperOperator::zero(l_t.dim());
  if (ssm_dim == n) return SuperOperator::identity(l_t.dim());

  SchurForm schur = complex_schur(l_t.matrix());
  const Vector w = schur.eigenvalues();
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(w(a)) < std::abs(w(b)); });
  const double radius = std::abs(w(order[ssm_dim - 1]));
  const double next = std::abs(w(order[ssm_dim]));
  if (next - radius < 10.0 * radius) {
    std::ostringstream msg;
    msg << "lambda_group_projector: cluster radius " << radius << " vs next eigenvalue " << next
        << " (gap collapse, T too small?)";
    throw NumericalError(msg.str());
  }
  std::vector<bool> select(n, false);
  for (Index i = 0; i < ssm_dim; ++i) select[order[i]] = true;
  const Index lead = reorder_schur(schur, select);
  return SuperOperator(split_leading_block(schur, lead).projector);
}

SuperOperator first_order_projector_shift(const SsmData& ssm, const SuperOperator& k_tilde,
                                          double t_scale) {
  return (-1.0 / t_scale) *
         (ssm.p0 * k_tilde * ssm.resolvent + ssm.resolvent * k_tilde * ssm.p0);
}

// ---------------------------------------------------------------------------
// Hamiltonian kernel

EnergyPinching::EnergyPinching(const Operator& h0, double tol) : dim_(h0.dim()) {
  if (!h0.is_hermitian(1e-12)) throw ModelError("EnergyPinching: H0 must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h0.matrix());
  if (solver.info() != Eigen::Success) throw NumericalError("EnergyPinching: eigensolver failed");
  const auto& e = solver.eigenvalues();
  const Matrix& v = solver.eigenvectors();
  const double eps = tol > 0.0 ? tol : 1e-9 * std::max(1.0, e.cwiseAbs().maxCoeff());
  Index start = 0;
  for (Index i = 1; i <= e.size(); ++i) {
    if (i == e.size() || e(i) - e(i - 1) > eps) {
      levels_.push_back(e.segment(start, i - start).mean());
      spaces_.push_back(v.middleCols(start, i - start));
      start = i;
    }
  }
  gap_ = std::numeric_limits<double>::infinity();
  for (std::size_t a = 1; a < levels_.size(); ++a) {
    gap_ = std::min(gap_, levels_[a] - levels_[a - 1]);
  }
  if (!std::isfinite(gap_)) gap_ = 0.0;
}

Index EnergyPinching::rank() const {
  Index r = 0;
  for (const auto& s : spaces_) r += s.cols() * s.cols();
  return r;
}

const Matrix& EnergyPinching::eigenspace_near(double energy) const {
  std::size_t best = 0;
  for (std::size_t a = 1; a < levels_.size(); ++a) {
    if (std::abs(levels_[a] - energy) < std::abs(levels_[best] - energy)) best = a;
  }
  return spaces_[best];
}

Operator EnergyPinching::apply(const Operator& x) const {
  if (x.dim() != dim_) throw ModelError("EnergyPinching::apply: dimension mismatch");
  Matrix out = Matrix::Zero(dim_, dim_);
  for (const auto& s : spaces_) {
    out += s * (s.adjoint() * x.matrix() * s) * s.adjoint();
  }
  return Operator(std::move(out));
}

std::vector<Matrix> EnergyPinching::kernel_basis() const {
  std::vector<Matrix> basis;
  basis.reserve(static_cast<std::size_t>(rank()));
  for (const auto& s : spaces_) {
    for (Index a = 0; a < s.cols(); ++a) {
      for (Index b = 0; b < s.cols(); ++b) {
        basis.push_back(s.col(a) * s.col(b).adjoint());
      }
    }
  }
  return basis;
}

SuperOperator EnergyPinching::superoperator() const {
  Matrix p = Matrix::Zero(dim_ * dim_, dim_ * dim_);
  for (const auto& s : spaces_) {
    const Matrix proj = s * s.adjoint();
    // vec(Pi X Pi) = (Pi^T (x) Pi) vec(X)
    p += kron(proj.transpose(), proj);
  }
  return SuperOperator(std::move(p));
}

}  // namespace ssmdyn
