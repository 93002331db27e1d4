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

#include "ssmdyn/schur.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace ssmdyn {

SchurForm complex_schur(const Matrix& m) {
  if (m.rows() != m.cols()) throw ModelError("complex_schur: matrix must be square");
  if (!all_finite(m)) throw ModelError("complex_schur: non-finite input");
  Eigen::ComplexSchur<Matrix> schur(m, true);
  if (schur.info() != Eigen::Success) {
    throw NumericalError("complex_schur: QR iteration failed to converge");
  }
  SchurForm out{schur.matrixU(), schur.matrixT()};
  // Eigen leaves round-off below the diagonal untouched in some paths.
  out.t.triangularView<Eigen::StrictlyLower>().setZero();
  return out;
}

void swap_adjacent(SchurForm& s, Index k) {
  Matrix& t = s.t;
  const Index n = t.rows();
  if (k < 0 || k + 1 >= n) throw ModelError("swap_adjacent: index out of range");
  const cplx t11 = t(k, k);
  const cplx t22 = t(k + 1, k + 1);
  const cplx f = t(k, k + 1);
  const cplx g = t22 - t11;

  // Rotation [c s; -conj(s) c] mapping (f, g) to (r, 0).
  double c = 1.0;
  cplx sn = 0.0;
  if (g == cplx(0.0)) {
    // Equal eigenvalues: nothing to exchange.
  } else if (f == cplx(0.0)) {
    c = 0.0;
    sn = std::conj(g) / std::abs(g);
  } else {
    const double norm = std::hypot(std::abs(f), std::abs(g));
    c = std::abs(f) / norm;
    sn = (f / std::abs(f)) * std::conj(g) / norm;
  }

  for (Index j = k + 2; j < n; ++j) {
    const cplx a = t(k, j);
    const cplx b = t(k + 1, j);
    t(k, j) = c * a + sn * b;
    t(k + 1, j) = c * b - std::conj(sn) * a;
  }
  for (Index i = 0; i < k; ++i) {
    const cplx a = t(i, k);
    const cplx b = t(i, k + 1);
    t(i, k) = c * a + std::conj(sn) * b;
    t(i, k + 1) = c * b - sn * a;
  }
  t(k, k) = t22;
  t(k + 1, k + 1) = t11;
  for (Index i = 0; i < s.q.rows(); ++i) {
    const cplx a = s.q(i, k);
    const cplx b = s.q(i, k + 1);
    s.q(i, k) = c * a + std::conj(sn) * b;
    s.q(i, k + 1) = c * b - sn * a;
  }
}

Index reorder_schur(SchurForm& s, std::vector<bool> select) {
  const Index n = s.t.rows();
  if (static_cast<Index>(select.size()) != n) {
    throw ModelError("reorder_schur: selection size mismatch");
  }
  Index dest = 0;
  for (Index i = 0; i < n; ++i) {
    if (!select[i]) continue;
    for (Index k = i; k > dest; --k) {
      swap_adjacent(s, k - 1);
      std::swap(select[k - 1], select[k]);
    }
    ++dest;
  }
  return dest;
}

Matrix solve_triangular_sylvester(const Matrix& a, const Matrix& b, const Matrix& c) {
  const Index m = a.rows();
  const Index n = b.rows();
  if (a.cols() != m || b.cols() != n || c.rows() != m || c.cols() != n) {
    throw ModelError("solve_triangular_sylvester: shape mismatch");
  }
  double sep = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) sep = std::min(sep, std::abs(a(i, i) - b(j, j)));
  }
  if (m > 0 && n > 0 && !(sep > 0.0)) {
    throw NumericalError("solve_triangular_sylvester: blocks share an eigenvalue");
  }

  Matrix x = Matrix::Zero(m, n);
  const Matrix id = Matrix::Identity(m, m);
  for (Index j = 0; j < n; ++j) {
    Vector rhs = c.col(j);
    if (j > 0) rhs += x.leftCols(j) * b.col(j).head(j);
    const Matrix shifted = a - b(j, j) * id;
    x.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return x;
}

InvariantSplit split_leading_block(const SchurForm& ordered, Index lead) {
  const Index n = ordered.t.rows();
  if (lead < 0 || lead > n) throw ModelError("split_leading_block: bad block size");
  InvariantSplit out;
  out.lead = lead;
  const Index rest = n - lead;
  out.y = Matrix::Zero(lead, rest);
  if (lead > 0 && rest > 0) {
    out.y = solve_triangular_sylvester(ordered.t.topLeftCorner(lead, lead),
                                       ordered.t.bottomRightCorner(rest, rest),
                                       -ordered.t.topRightCorner(lead, rest));
  }
  Matrix inner = Matrix::Zero(n, n);
  inner.topLeftCorner(lead, lead).setIdentity();
  inner.topRightCorner(lead, rest) = -out.y;
  out.projector = ordered.q * inner * ordered.q.adjoint();
  return out;
}

}  // namespace ssmdyn
