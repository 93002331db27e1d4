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

/// Qubit-register operators.
///
/// Spin convention: S_j^a = sigma_j^a / 2, so S^2 = sum_a (S^a)^2 has
/// eigenvalues J(J+1) with half-integer J. Sites are numbered from 1, and
/// site 1 is the leftmost tensor factor. sigma^z |0> = +|0>.
namespace ssmdyn {

enum class Axis { x, y, z };

class SpinRegister {
 public:
  explicit SpinRegister(int n_sites);

  int n_sites() const { return n_sites_; }
  static constexpr int local_dim() { return 2; }
  Index hilbert_dim() const { return Index{1} << n_sites_; }

 private:
  int n_sites_;
};

/// 2x2 Pauli matrix.
Matrix pauli(Axis axis);

/// sigma^axis on `site` (1-based), identity elsewhere.
Operator site_pauli(const SpinRegister& reg, int site, Axis axis);

/// S^axis = sum_j sigma_j^axis / 2.
Operator collective_spin(const SpinRegister& reg, Axis axis);

/// S^- = S^x - i S^y.
Operator collective_lowering(const SpinRegister& reg);

/// Total spin S^2 = (S^x)^2 + (S^y)^2 + (S^z)^2.
Operator total_spin_squared(const SpinRegister& reg);

/// Permutation operator exchanging two sites (1-based).
Operator site_swap(const SpinRegister& reg, int site_a, int site_b);

/// One summand C^{n} (x) C^{d} of an operator-algebra decomposition of H.
///
/// The isometry has n * d columns ordered with the multiplicity index major:
/// column a * d + m is the state |a> (x) |m>. For collective-spin blocks the
/// label is J and m runs from M = J down to M = -J.
struct AlgebraBlock {
  double label = 0.0;
  Index multiplicity = 0;
  Index block_dim = 0;
  Matrix isometry;

  /// Orthogonal projector onto the block's range.
  Matrix projector() const { return isometry * isometry.adjoint(); }
};

using AngularMomentumBlock = AlgebraBlock;

/// Decomposes the register into total-spin blocks J with multiplicity n_J
/// and dimension d_J = 2J + 1, by diagonalising S^2 and S^z and generating
/// each block's magnetic ladder from its highest-weight states with S^-.
/// Blocks are returned in increasing J. Requires n_sites <= 12.
std::vector<AlgebraBlock> total_spin_blocks(const SpinRegister& reg);

/// Blocks of an Abelian algebra generated by a single Hermitian operator:
/// one block per eigenvalue, with block_dim 1 and multiplicity equal to the
/// eigenspace dimension. The label is the eigenvalue.
std::vector<AlgebraBlock> eigenspace_blocks(const Operator& generator, double tol = 1e-8);

/// Encoded qubit inside the two-fold J = 0 subspace of four spins.
struct LogicalQubit {
  Vector zero;
  Vector one;
  /// Columns |0_L>, |1_L>.
  Matrix basis;
  Operator projector;

  /// B^H x B: the 2x2 matrix of x in the logical basis.
  Matrix compress(const Matrix& x) const { return basis.adjoint() * x * basis; }
  /// B x B^H.
  Matrix embed(const Matrix& x) const { return basis * x * basis.adjoint(); }
};

/// DFS gate Hamiltonians on four spins:
///   H^x = 3/2 (s1z s2z + s2z s3z) + 1
///   H^z = -sqrt(3)/2 (s1z s2z - s2z s3z) + s1z
/// Only x and z are defined.
Operator dfs_gate_hamiltonian(const SpinRegister& reg, Axis axis);

/// Orthonormal basis of the J = 0 subspace of a four-spin register, with
/// phases fixed so that Pi H^z Pi = sigma^z and Pi H^x Pi = sigma^x:
/// |0_L> is the +1 eigenvector of Pi H^z Pi, and the phase of |1_L> makes
/// <0_L|H^x|1_L> real and positive.
LogicalQubit logical_basis_j0(const SpinRegister& reg);

}  // namespace ssmdyn
