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
#include <limits>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "ssmdyn/spin_ops.hpp"
#include "ssmdyn/tensor.hpp"
#include "test_util.hpp"

namespace ssmdyn {
namespace {

using testing::max_abs;
using testing::random_matrix;

TEST(Kron, IdentityTimesIdentity) {
  EXPECT_EQ(max_abs(kron(Matrix::Identity(2, 2), Matrix::Identity(2, 2)) - Matrix::Identity(4, 4)),
            0.0);
}

TEST(Kron, ZZIsDiagonal) {
  const Matrix z = pauli(Axis::z);
  Vector expected(4);
  expected << 1.0, -1.0, -1.0, 1.0;
  EXPECT_EQ(max_abs(kron(z, z) - Matrix(expected.asDiagonal())), 0.0);
}

TEST(Kron, MixedProductRule) {
  const Matrix a = random_matrix(3, 3, 1), b = random_matrix(3, 3, 2);
  const Matrix c = random_matrix(3, 3, 3), d = random_matrix(3, 3, 4);
  EXPECT_LT(max_abs(kron(a, b) * kron(c, d) - kron(a * c, b * d)), 1e-12);
}

TEST(Kron, RectangularShapeAndEntries) {
  const Matrix a = random_matrix(2, 3, 5), b = random_matrix(4, 1, 6);
  const Matrix k = kron(a, b);
  ASSERT_EQ(k.rows(), 8);
  ASSERT_EQ(k.cols(), 3);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 3; ++j)
      for (Index p = 0; p < 4; ++p) EXPECT_EQ(k(i * 4 + p, j), a(i, j) * b(p, 0));
}

TEST(Vec, ColumnStackingRule) {
  const Matrix a = random_matrix(3, 3, 7), x = random_matrix(3, 3, 8), b = random_matrix(3, 3, 9);
  EXPECT_LT((vec(a * x * b) - kron(b.transpose(), a) * vec(x)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(max_abs(unvec(vec(x), 3) - x), 0.0);
  EXPECT_EQ(vec(x)(1), x(1, 0));
}

TEST(Expm, ZeroIsIdentity) {
  EXPECT_EQ(max_abs(expm(Matrix::Zero(5, 5)) - Matrix::Identity(5, 5)), 0.0);
}

TEST(Expm, Diagonal) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = cplx(0.3, 1.0);
  d(1, 1) = -2.5;
  const Matrix e = expm(d);
  EXPECT_LT(std::abs(e(0, 0) - std::exp(cplx(0.3, 1.0))), 1e-14);
  EXPECT_LT(std::abs(e(1, 1) - std::exp(-2.5)), 1e-15);
  EXPECT_EQ(std::abs(e(0, 1)), 0.0);
}

TEST(Expm, PauliRotationAgainstSeries) {
  const Matrix a = -kI * pauli(Axis::x);
  const Matrix closed = std::cos(1.0) * Matrix::Identity(2, 2) - kI * std::sin(1.0) * pauli(Axis::x);
  EXPECT_LT(max_abs(expm(a) - closed), 1e-15);
  EXPECT_LT(max_abs(expm(a) - testing::expm_series(a)), 1e-14);
}

TEST(Expm, RelativeAccuracyAtLargeNorm) {
  // Normal matrix with known spectrum: exp is available in closed form.
  const Eigen::HouseholderQR<Matrix> qr(random_matrix(12, 12, 10));
  const Matrix q = qr.householderQ();
  Vector lambda(12);
  for (Index i = 0; i < 12; ++i) lambda(i) = cplx(-60.0 + 5.0 * i, 40.0 * std::sin(i));
  const Matrix a = q * lambda.asDiagonal() * q.adjoint();
  ASSERT_GT(a.cwiseAbs().colwise().sum().maxCoeff(), 100.0);
  const Matrix exact = q * lambda.array().exp().matrix().asDiagonal() * q.adjoint();
  EXPECT_LT(max_abs(expm(a) - exact) / max_abs(exact), 1e-12);
}

TEST(Expm, EveryPadeDegreeAgainstSeries) {
  const Matrix base = random_matrix(6, 6, 11);
  const double norm1 = base.cwiseAbs().colwise().sum().maxCoeff();
  for (double target : {0.01, 0.2, 0.9, 2.0, 5.0, 30.0}) {
    const Matrix a = base * (target / norm1);
    // Series via squaring keeps the oracle accurate for larger norms.
    Matrix ref = testing::expm_series(a / 64.0, 40);
    for (int i = 0; i < 6; ++i) ref = ref * ref;
    EXPECT_LT(max_abs(expm(a) - ref) / max_abs(ref), 1e-12) << "norm " << target;
  }
}

TEST(Expm, CommutingPairFactorises) {
  const Eigen::HouseholderQR<Matrix> qr(random_matrix(6, 6, 12));
  const Matrix v = Matrix(qr.householderQ()) + 0.3 * random_matrix(6, 6, 13);
  const Matrix vinv = v.inverse();
  const Matrix a = v * random_matrix(6, 1, 14).col(0).asDiagonal() * vinv;
  const Matrix b = v * random_matrix(6, 1, 15).col(0).asDiagonal() * vinv;
  ASSERT_LT(max_abs(a * b - b * a), 1e-10);
  EXPECT_LT(max_abs(expm(a + b) - expm(a) * expm(b)) / max_abs(expm(a + b)), 1e-10);
}

TEST(Expm, SimilarityCovariance) {
  const Matrix a = random_matrix(5, 5, 16);
  const Matrix u = random_matrix(5, 5, 17) + 3.0 * Matrix::Identity(5, 5);
  const Matrix lhs = expm(u * a * u.inverse());
  const Matrix rhs = u * expm(a) * u.inverse();
  EXPECT_LT(max_abs(lhs - rhs) / max_abs(rhs), 1e-9);
}

TEST(Expm, RejectsNonFinite) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(expm(a), ModelError);
}

TEST(Eig, DiagonalMatrix) {
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 1.0, 2.0, 3.0;
  const auto e = eig(d);
  for (Index k = 0; k < 3; ++k) {
    Index found = -1;
    for (Index i = 0; i < 3; ++i)
      if (std::abs(e.values(i) - d(k, k)) < 1e-14) found = i;
    ASSERT_GE(found, 0);
    EXPECT_NEAR(std::abs(e.right(k, found)), 1.0, 1e-14);
  }
}

TEST(Eig, PauliX) {
  const auto e = eig(pauli(Axis::x));
  std::vector<double> re = {e.values(0).real(), e.values(1).real()};
  std::sort(re.begin(), re.end());
  EXPECT_NEAR(re[0], -1.0, 1e-14);
  EXPECT_NEAR(re[1], 1.0, 1e-14);
}

TEST(Eig, ResidualsBiorthogonalityAndReconstruction) {
  const Matrix m = random_matrix(20, 20, 18);
  const auto e = eig(m);
  const double norm = svd_max(m);
  for (Index k = 0; k < 20; ++k) {
    EXPECT_LT((m * e.right.col(k) - e.values(k) * e.right.col(k)).norm(), 1e-10 * norm);
    EXPECT_LT((e.left.col(k).adjoint() * m - e.values(k) * e.left.col(k).adjoint()).norm(),
              1e-10 * norm);
  }
  EXPECT_LT(max_abs(e.left.adjoint() * e.right - Matrix::Identity(20, 20)), 1e-9);
  const Matrix rebuilt = e.right * e.values.asDiagonal() * e.left.adjoint();
  EXPECT_LT(max_abs(rebuilt - m) / max_abs(m), 1e-9);
  EXPECT_GE(e.condition, 1.0);
}

TEST(SvdMax, Examples) {
  EXPECT_NEAR(svd_max(Matrix::Identity(7, 7)), 1.0, 1e-15);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = -4.0;
  EXPECT_NEAR(svd_max(d), 4.0, 1e-14);
}

TEST(SvdMax, MatchesEigenvalueOracle) {
  const Matrix m = random_matrix(10, 10, 19);
  const Eigen::SelfAdjointEigenSolver<Matrix> es(m.adjoint() * m);
  const double oracle = std::sqrt(es.eigenvalues().maxCoeff());
  EXPECT_LT(std::abs(svd_max(m) - oracle) / oracle, 1e-10);
}

TEST(SvdMax, PowerIterationAgrees) {
  for (std::uint64_t seed : {20, 21, 22}) {
    const Matrix m = random_matrix(16, 9, seed);
    EXPECT_LT(std::abs(svd_max(m) - svd_max_power(m)) / svd_max(m), 1e-10);
  }
  EXPECT_EQ(svd_max_power(Matrix::Zero(3, 3)), 0.0);
}

TEST(SvdMax, Submultiplicative) {
  for (std::uint64_t seed = 30; seed < 40; ++seed) {
    const Matrix a = random_matrix(6, 6, seed), b = random_matrix(6, 6, seed + 100);
    EXPECT_LE(svd_max(a * b), svd_max(a) * svd_max(b) * (1 + 1e-14));
  }
}

TEST(Operator, Validation) {
  EXPECT_THROW(Operator(Matrix::Zero(2, 3)), ModelError);
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(Operator{bad}, ModelError);
  EXPECT_TRUE(Operator(pauli(Axis::y)).is_hermitian(0.0));
  EXPECT_FALSE(Operator(Matrix(kI * pauli(Axis::y))).is_hermitian(1e-12));
}

TEST(SuperOperator, ShapeAndApply) {
  EXPECT_THROW(SuperOperator(Matrix::Zero(5, 5)), ModelError);
  const SuperOperator id = SuperOperator::identity(3);
  EXPECT_EQ(id.dim(), 3);
  EXPECT_EQ(id.size(), 9);
  const Matrix x = random_matrix(3, 3, 41);
  EXPECT_EQ(max_abs(id.apply(Operator(x)).matrix() - x), 0.0);
  const Matrix a = random_matrix(3, 3, 42);
  const SuperOperator left(kron(Matrix::Identity(3, 3), a));
  EXPECT_LT(max_abs(left.apply(Operator(x)).matrix() - a * x), 1e-13);
}

}  // namespace
}  // namespace ssmdyn
