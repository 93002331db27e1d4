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

#include <cstdint>
#include <random>

#include "ssmdyn/tensor.hpp"

namespace ssmdyn::testing {

inline Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = cplx(n(rng), n(rng));
  return m;
}

inline Matrix random_hermitian(Index d, std::uint64_t seed) {
  const Matrix g = random_matrix(d, d, seed);
  return 0.5 * (g + g.adjoint());
}

inline Matrix random_density(Index d, std::uint64_t seed) {
  const Matrix g = random_matrix(d, d, seed);
  Matrix rho = g * g.adjoint();
  return rho / rho.trace();
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Truncated Taylor series, only for small norms.
inline Matrix expm_series(const Matrix& a, int terms = 30) {
  Matrix sum = Matrix::Identity(a.rows(), a.cols());
  Matrix term = sum;
  for (int k = 1; k < terms; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

}  // namespace ssmdyn::testing
