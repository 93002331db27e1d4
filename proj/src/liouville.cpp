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

#include "ssmdyn/liouville.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace ssmdyn {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kWeightTol = 1e-10;

Eigen::VectorXcd eigenvalues_of(const Matrix& m) {
  Eigen::ComplexEigenSolver<Matrix> solver(m, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalue iteration failed to converge");
  }
  return solver.eigenvalues();
}

}  // namespace

void LiouvillianModel::validate() const {
  if (dim <= 0) throw ModelError("model dimension must be positive");
  for (const auto& t : hamiltonian_terms) {
    if (t.op.dim() != dim) throw ModelError("Hamiltonian term dimension mismatch");
    if (!std::isfinite(t.coefficient)) throw ModelError("Hamiltonian coefficient not finite");
    if (!t.op.is_hermitian(kHermitianTol)) throw ModelError("Hamiltonian term is not Hermitian");
  }
  for (const auto& t : lindblad_terms) {
    if (t.op.dim() != dim) throw ModelError("Lindblad term dimension mismatch");
    if (!(t.rate >= 0.0) || !std::isfinite(t.rate)) {
      throw ModelError("Lindblad rates must be finite and nonnegative");
    }
  }
  if (!kraus_terms.empty()) {
    double total = 0.0;
    for (const auto& t : kraus_terms) {
      if (t.op.dim() != dim) throw ModelError("Kraus term dimension mismatch");
      if (!(t.weight >= 0.0)) throw ModelError("Kraus weights must be nonnegative");
      total += t.weight;
    }
    if (std::abs(total - 1.0) > kWeightTol) {
      throw ModelError("Kraus weights must sum to 1");
    }
  }
  if (perturbation.dim() != 0 && perturbation.dim() != dim) {
    throw ModelError("perturbation dimension mismatch");
  }
  if (perturbation.dim() != 0 && !perturbation.is_hermitian(kHermitianTol)) {
    throw ModelError("perturbation is not Hermitian");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ModelError("scale T must be positive");
  if (!std::isfinite(strength)) throw ModelError("strength must be finite");
}

SuperOperator hamiltonian_superop(const Operator& h) {
  if (!h.is_hermitian(kHermitianTol)) {
    throw ModelError("hamiltonian_superop: operator is not Hermitian");
  }
  const Index d = h.dim();
  const Matrix id = Matrix::Identity(d, d);
  return SuperOperator(Matrix(-kI * (kron(id, h.matrix()) - kron(h.matrix().transpose(), id))));
}

SuperOperator lindblad_superop(std::span<const LindbladTerm> terms, Index dim) {
  const Matrix id = Matrix::Identity(dim, dim);
  Matrix out = Matrix::Zero(dim * dim, dim * dim);
  for (const auto& t : terms) {
    if (t.op.dim() != dim) throw ModelError("lindblad_superop: dimension mismatch");
    if (!(t.rate >= 0.0)) throw ModelError("lindblad_superop: negative rate");
    if (t.rate == 0.0) continue;
    const Matrix& l = t.op.matrix();
    const Matrix ldl = l.adjoint() * l;
    out += t.rate * (kron(l.conjugate(), l) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id));
  }
  return SuperOperator(std::move(out));
}

SuperOperator kraus_generator(std::span<const KrausTerm> terms) {
  if (terms.empty()) throw ModelError("kraus_generator: empty Kraus list");
  const Index d = terms.front().op.dim();
  double total = 0.0;
  Matrix out = Matrix::Zero(d * d, d * d);
  for (const auto& t : terms) {
    if (t.op.dim() != d) throw ModelError("kraus_generator: dimension mismatch");
    if (!(t.weight >= 0.0)) throw ModelError("kraus_generator: negative weight");
    total += t.weight;
    out += t.weight * kron(t.op.matrix().conjugate(), t.op.matrix());
  }
  if (std::abs(total - 1.0) > kWeightTol) {
    std::ostringstream msg;
    msg << "kraus_generator: weights sum to " << total << ", expected 1";
    throw ModelError(msg.str());
  }
  out -= Matrix::Identity(d * d, d * d);
  return SuperOperator(std::move(out));
}

double superop_scale(const SuperOperator& s) {
  return s.matrix().cwiseAbs().colwise().sum().maxCoeff();
}

AssembledModel assemble(const LiouvillianModel& model, const AssembleOptions& options) {
  model.validate();
  const Index d = model.dim;

  SuperOperator l0 = lindblad_superop(model.lindblad_terms, d);
  if (!model.hamiltonian_terms.empty()) {
    Operator h = Operator::zero(d);
    for (const auto& t : model.hamiltonian_terms) h += t.coefficient * t.op;
    l0 += hamiltonian_superop(h);
  }
  if (!model.kraus_terms.empty()) l0 += kraus_generator(model.kraus_terms);

  SuperOperator k = SuperOperator::zero(d);
  if (model.perturbation.dim() != 0) {
    k = model.strength * hamiltonian_superop(model.perturbation);
  }

  if (options.validate_spectrum) {
    const double tol = options.spectral_tol * std::max(1.0, superop_scale(l0));
    const auto w = eigenvalues_of(l0.matrix());
    for (Index i = 0; i < w.size(); ++i) {
      if (w(i).real() > tol) {
        std::ostringstream msg;
        msg << "assemble: L0 has eigenvalue " << w(i) << " with positive real part";
        throw ModelError(msg.str());
      }
    }
  }

  SuperOperator l_t = l0 + (1.0 / model.scale) * k;
  return {std::move(l0), std::move(k), std::move(l_t)};
}

double relaxation_time(const SuperOperator& l0, double cluster_tol) {
  const double scale = std::max(1.0, superop_scale(l0));
  const double tol = cluster_tol > 0.0 ? cluster_tol : 1e-9 * scale;
  const auto w = eigenvalues_of(l0.matrix());
  double min_re = std::numeric_limits<double>::infinity();
  bool nontrivial = false;
  for (Index i = 0; i < w.size(); ++i) {
    if (std::abs(w(i)) <= tol) continue;
    nontrivial = true;
    const double re = std::abs(w(i).real());
    if (re > tol) min_re = std::min(min_re, re);
  }
  if (!nontrivial) {
    throw NumericalError("relaxation_time: spectrum is entirely in the kernel cluster");
  }
  if (!std::isfinite(min_re)) {
    throw NumericalError("relaxation_time: undefined for a purely oscillatory spectrum");
  }
  return 1.0 / min_re;
}

}  // namespace ssmdyn
