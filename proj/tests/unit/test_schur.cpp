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

#include <gtest/gtest.h>

#include "ssmdyn/schur.hpp"
#include "test_util.hpp"

namespace ssmdyn {
namespace {

using testing::max_abs;
using testing::random_matrix;

double lower_part(const Matrix& t) {
  double m = 0.0;
  for (Index j = 0; j < t.cols(); ++j)
    for (Index i = j + 1; i < t.rows(); ++i) m = std::max(m, std::abs(t(i, j)));
  return m;
}

TEST(Schur, FactorisationAndTriangularity) {
  const Matrix a = random_matrix(12, 12, 1);
  const SchurForm s = complex_schur(a);
  EXPECT_EQ(lower_part(s.t), 0.0);
  EXPECT_LT(max_abs(s.q * s.t * s.q.adjoint() - a), 1e-12);
  EXPECT_LT(max_abs(s.q.adjoint() * s.q - Matrix::Identity(12, 12)), 1e-13);
}

TEST(Schur, SwapPreservesFactorisation) {
  const Matrix a = random_matrix(8, 8, 2);
  SchurForm s = complex_schur(a);
  const cplx t33 = s.t(3, 3), t44 = s.t(4, 4);
  swap_adjacent(s, 3);
  EXPECT_LT(std::abs(s.t(3, 3) - t44), 1e-12);
  EXPECT_LT(std::abs(s.t(4, 4) - t33), 1e-12);
  EXPECT_LT(std::abs(s.t(4, 3)), 1e-12);
  EXPECT_LT(max_abs(s.q * s.t * s.q.adjoint() - a), 1e-12);
  EXPECT_THROW(swap_adjacent(s, 7), ModelError);
}

TEST(Schur, ReorderMovesSelectionToFront) {
  const Matrix a = random_matrix(10, 10, 3);
  SchurForm s = complex_schur(a);
  std::vector<bool> select(10, false);
  std::vector<cplx> chosen;
  for (Index i = 0; i < 10; ++i) {
    if (s.t(i, i).real() > 0) {
      select[i] = true;
      chosen.push_back(s.t(i, i));
    }
  }
  const Index lead = reorder_schur(s, select);
  EXPECT_EQ(lead, static_cast<Index>(chosen.size()));
  for (Index i = 0; i < 10; ++i) EXPECT_EQ(s.t(i, i).real() > 0, i < lead);
  EXPECT_LT(max_abs(s.q * s.t * s.q.adjoint() - a), 1e-11);
}

TEST(Sylvester, TriangularSolveResidual) {
  Matrix a = random_matrix(4, 4, 4).triangularView<Eigen::Upper>();
  Matrix b = random_matrix(5, 5, 5).triangularView<Eigen::Upper>();
  a.diagonal().array() += 4.0;
  const Matrix c = random_matrix(4, 5, 6);
  const Matrix x = solve_triangular_sylvester(a, b, c);
  EXPECT_LT(max_abs(a * x - x * b - c), 1e-12);
}

TEST(Sylvester, SharedEigenvalueRejected) {
  Matrix a = Matrix::Identity(2, 2);
  Matrix b = Matrix::Identity(2, 2);
  EXPECT_THROW(solve_triangular_sylvester(a, b, Matrix::Zero(2, 2)), NumericalError);
}

TEST(InvariantSplit, SpectralProjectorOfLeadingBlock) {
  const Matrix a = random_matrix(9, 9, 7);
  SchurForm s = complex_schur(a);
  std::vector<bool> select(9, false);
  select[2] = select[5] = select[8] = true;
  const Index lead = reorder_schur(s, select);
  const InvariantSplit split = split_leading_block(s, lead);
  const Matrix& p = split.projector;
  EXPECT_LT(max_abs(p * p - p), 1e-10);
  EXPECT_LT(max_abs(a * p - p * a), 1e-10);
  EXPECT_NEAR(p.trace().real(), 3.0, 1e-10);
}

}  // namespace
}  // namespace ssmdyn
