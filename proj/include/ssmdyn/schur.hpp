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

#include <vector>

#include "ssmdyn/tensor.hpp"

namespace ssmdyn {

/// m = q * t * q^H with q unitary and t upper triangular.
struct SchurForm {
  Matrix q;
  Matrix t;

  Vector eigenvalues() const { return t.diagonal(); }
};

SchurForm complex_schur(const Matrix& m);

/// Exchanges the diagonal entries k and k+1 of t with a Givens rotation,
/// updating q so that q t q^H is unchanged.
void swap_adjacent(SchurForm& s, Index k);

/// Moves every diagonal entry with select[i] set to the leading block, keeping
/// the relative order inside both groups. Returns the size of the leading block.
Index reorder_schur(SchurForm& s, std::vector<bool> select);

/// Solves A X - X B = C for upper-triangular A (m x m) and B (n x n).
/// Throws NumericalError when A and B share an eigenvalue.
Matrix solve_triangular_sylvester(const Matrix& a, const Matrix& b, const Matrix& c);

/// Block decoupling of an ordered Schur form with a leading block of size `lead`:
/// y solves T11 Y - Y T22 = -T12. The spectral projector onto the leading
/// invariant subspace is q [[I, -Y], [0, 0]] q^H.
struct InvariantSplit {
  Index lead = 0;
  Matrix y;
  Matrix projector;
};

InvariantSplit split_leading_block(const SchurForm& ordered, Index lead);

}  // namespace ssmdyn
