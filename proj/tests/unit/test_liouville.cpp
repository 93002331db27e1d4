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

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "ssmdyn/experiments.hpp"
#include "ssmdyn/liouville.hpp"
#include "ssmdyn/spin_ops.hpp"
#include "test_util.hpp"

namespace ssmdyn {
namespace {

using testing::max_abs;
using testing::random_density;
using testing::random_hermitian;
using testing::random_matrix;

Vector vec_identity(Index d) { return vec(Matrix::Identity(d, d)); }

double trace_residual(const SuperOperator& l) {
  return (vec_identity(l.dim()).adjoint() * l.matrix()).cwiseAbs().maxCoeff();
}

TEST(HamiltonianSuperop, IdentityGivesZero) {
  EXPECT_EQ(max_abs(hamiltonian_superop(Operator::identity(3)).matrix()), 0.0);
}

TEST(HamiltonianSuperop, SigmaZSpectrum) {
  const Eigen::ComplexEigenSolver<Matrix> es(hamiltonian_superop(Operator(pauli(Axis::z))).matrix());
  std::vector<double> im;
  for (Index i = 0; i < 4; ++i) {
    EXPECT_NEAR(es.eigenvalues()(i).real(), 0.0, 1e-14);
    im.push_back(es.eigenvalues()(i).imag());
  }
  std::sort(im.begin(), im.end());
  EXPECT_NEAR(im[0], -2.0, 1e-14);
  EXPECT_NEAR(im[1], 0.0, 1e-14);
  EXPECT_NEAR(im[2], 0.0, 1e-14);
  EXPECT_NEAR(im[3], 2.0, 1e-14);
}

TEST(HamiltonianSuperop, ConjugationOracle) {
  const Matrix h = random_hermitian(3, 1);
  const Matrix rho = random_density(3, 2);
  const double t = 0.7;
  const Matrix lhs = unvec(expm(t * hamiltonian_superop(Operator(h)).matrix()) * vec(rho), 3);
  const Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Matrix u = es.eigenvectors() *
                   (-kI * t * es.eigenvalues().cast<cplx>()).array().exp().matrix().asDiagonal() *
                   es.eigenvectors().adjoint();
  EXPECT_LT(max_abs(lhs - u * rho * u.adjoint()), 1e-10);
}

TEST(HamiltonianSuperop, AntiHermitianAndKillsIdentity) {
  const Matrix l = hamiltonian_superop(Operator(random_hermitian(4, 3))).matrix();
  EXPECT_LT(max_abs(l + l.adjoint()), 1e-13);
  EXPECT_LT((l * vec_identity(4)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(HamiltonianSuperop, RejectsNonHermitian) {
  EXPECT_THROW(hamiltonian_superop(Operator(random_matrix(2, 2, 4))), ModelError);
}

TEST(LindbladSuperop, DephasingOracle) {
  const std::vector<LindbladTerm> terms = {{Operator(pauli(Axis::z)), 1.0}};
  const SuperOperator l = lindblad_superop(terms, 2);
  // Diagonal in the |i><j| basis: populations fixed, coherences decay at rate 2.
  Vector expected(4);
  expected << 0.0, -2.0, -2.0, 0.0;
  EXPECT_LT(max_abs(l.matrix() - Matrix(expected.asDiagonal())), 1e-15);
}

TEST(LindbladSuperop, AmplitudeDampingSteadyState) {
  // sigma^- = |1><0| with sigma^z|0> = +|0>: lowers |0> into |1>.
  Matrix lower = Matrix::Zero(2, 2);
  lower(1, 0) = 1.0;
  const std::vector<LindbladTerm> terms = {{Operator(lower), 1.0}};
  const SuperOperator l = lindblad_superop(terms, 2);
  Matrix fixed = Matrix::Zero(2, 2);
  fixed(1, 1) = 1.0;
  EXPECT_LT((l.matrix() * vec(fixed)).norm(), 1e-15);
  const Eigen::ComplexEigenSolver<Matrix> es(l.matrix());
  int zeros = 0;
  for (Index i = 0; i < 4; ++i) zeros += std::abs(es.eigenvalues()(i)) < 1e-12;
  EXPECT_EQ(zeros, 1);
}

TEST(LindbladSuperop, ZeroRatesAndEmpty) {
  const std::vector<LindbladTerm> terms = {{Operator(pauli(Axis::x)), 0.0}};
  EXPECT_EQ(max_abs(lindblad_superop(terms, 2).matrix()), 0.0);
  EXPECT_EQ(max_abs(lindblad_superop({}, 3).matrix()), 0.0);
  EXPECT_EQ(lindblad_superop({}, 3).size(), 9);
}

TEST(LindbladSuperop, Errors) {
  const std::vector<LindbladTerm> negative = {{Operator(pauli(Axis::x)), -1.0}};
  EXPECT_THROW(lindblad_superop(negative, 2), ModelError);
  const std::vector<LindbladTerm> mismatch = {{Operator(pauli(Axis::x)), 1.0}};
  EXPECT_THROW(lindblad_superop(mismatch, 3), ModelError);
}

TEST(KrausGenerator, IdentityKrausIsZero) {
  const std::vector<KrausTerm> terms = {{Operator::identity(2), 1.0}};
  EXPECT_EQ(max_abs(kraus_generator(terms).matrix()), 0.0);
}

TEST(KrausGenerator, UnitalHasIdentityInKernel) {
  const SpinRegister reg(2);
  std::vector<KrausTerm> terms;
  for (Axis a : {Axis::x, Axis::y, Axis::z})
    terms.push_back({Operator(expm(kI * 0.8 * collective_spin(reg, a).matrix())), 1.0 / 3.0});
  const SuperOperator l = kraus_generator(terms);
  EXPECT_LT((l.matrix() * vec_identity(4)).norm(), 1e-14);
  EXPECT_LT(trace_residual(l), 1e-14);
}

TEST(KrausGenerator, WeightsMustSumToOne) {
  const std::vector<KrausTerm> terms = {{Operator::identity(2), 0.5}};
  EXPECT_THROW(kraus_generator(terms), ModelError);
}

TEST(KrausGenerator, Ns3KernelDimension) {
  const AssembledModel a = assemble(ns3_model());
  const Eigen::ComplexEigenSolver<Matrix> es(a.l0.matrix(), false);
  int zeros = 0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) zeros += std::abs(es.eigenvalues()(i)) < 1e-9;
  EXPECT_EQ(zeros, 5);
}

TEST(Assemble, ZeroStrengthGivesL0) {
  LiouvillianModel m = dfs4_model(Axis::x);
  m.strength = 0.0;
  m.scale = 10.0;
  const AssembledModel a = assemble(m);
  EXPECT_EQ(max_abs(a.l_t.matrix() - a.l0.matrix()), 0.0);
}

TEST(Assemble, Dfs4RankAndTracePreservation) {
  LiouvillianModel m = dfs4_model(Axis::z);
  m.scale = 50.0;
  const AssembledModel a = assemble(m);
  EXPECT_EQ(a.l0.size(), 256);
  const Eigen::ComplexEigenSolver<Matrix> es(a.l0.matrix(), false);
  int zeros = 0;
  for (Index i = 0; i < 256; ++i) zeros += std::abs(es.eigenvalues()(i)) < 1e-9;
  EXPECT_EQ(256 - zeros, 256 - 14);
  EXPECT_LT(trace_residual(a.l_t), 1e-10);
  EXPECT_LT(max_abs(a.l_t.matrix() - a.l0.matrix() - a.k_superop.matrix() / 50.0), 1e-15);
}

TEST(Assemble, HermiticityPreservation) {
  const AssembledModel a = assemble(ns3_model());
  const Matrix x = random_matrix(8, 8, 5);
  const Matrix lhs = a.l_t.apply(Operator(Matrix(x.adjoint()))).matrix();
  const Matrix rhs = a.l_t.apply(Operator(x)).matrix().adjoint();
  EXPECT_LT(max_abs(lhs - rhs), 1e-12);
}

TEST(Assemble, PositivityAndTraceUnderEvolution) {
  const AssembledModel a = assemble(dfs4_model(Axis::x));
  const Matrix rho = random_density(16, 6);
  for (double t : {0.1, 1.0, 10.0}) {
    const Matrix out = unvec(expm(t * a.l0.matrix()) * vec(rho), 16);
    EXPECT_NEAR(out.trace().real(), 1.0, 1e-10);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (out + out.adjoint()));
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-8);
  }
}

TEST(Assemble, SemigroupProperty) {
  const Matrix l = assemble(ns3_model()).l0.matrix();
  EXPECT_LT(max_abs(expm(3.0 * l) - expm(1.0 * l) * expm(2.0 * l)), 1e-9);
}

TEST(Assemble, RejectsAmplifyingGenerator) {
  // Kraus "weights" summing to one but with a non-contractive operator.
  LiouvillianModel m;
  m.dim = 2;
  m.kraus_terms.push_back({Operator(Matrix(2.0 * Matrix::Identity(2, 2))), 1.0});
  m.perturbation = Operator::zero(2);
  EXPECT_THROW(assemble(m), ModelError);
  AssembleOptions skip;
  skip.validate_spectrum = false;
  EXPECT_NO_THROW(assemble(m, skip));
}

TEST(Assemble, ValidationErrors) {
  LiouvillianModel m;
  m.dim = 2;
  m.perturbation = Operator::zero(3);
  EXPECT_THROW(m.validate(), ModelError);
  m.perturbation = Operator::zero(2);
  m.scale = 0.0;
  EXPECT_THROW(m.validate(), ModelError);
}

TEST(RelaxationTime, Dephasing) {
  const AssembledModel a = assemble(second_order_model());
  EXPECT_NEAR(relaxation_time(a.l0), 0.5, 1e-12);
  EXPECT_NEAR(relaxation_time(SuperOperator(Matrix(3.0 * a.l0.matrix()))), 0.5 / 3.0, 1e-12);
}

TEST(RelaxationTime, Dfs4FinitePositive) {
  const double tau = relaxation_time(assemble(dfs4_model(Axis::x)).l0);
  EXPECT_GT(tau, 0.0);
  EXPECT_TRUE(std::isfinite(tau));
}

TEST(RelaxationTime, UndefinedForHamiltonian) {
  const SuperOperator l = hamiltonian_superop(Operator(pauli(Axis::z)));
  EXPECT_THROW(relaxation_time(l), NumericalError);
}

}  // namespace
}  // namespace ssmdyn
