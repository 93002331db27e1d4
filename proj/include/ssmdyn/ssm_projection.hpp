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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssmdyn/spin_ops.hpp"
#include "ssmdyn/tensor.hpp"

/// Steady-state manifold projectors and effective generators.
namespace ssmdyn {

/// Kernel data of a generator L0.
///
/// Invariants (to 1e-8): P0^2 = P0, P0 L0 = L0 P0 = 0, S L0 = L0 S = Q0,
/// S P0 = P0 S = 0. P0 is in general not Hermitian.
struct SsmData {
  SuperOperator p0;
  SuperOperator q0;
  /// Reduced resolvent S, the pseudo-inverse of L0 supported on range(Q0).
  SuperOperator resolvent;
  Index ssm_dim = 0;
  /// 1 / min |Re lambda| outside the kernel; empty for purely oscillatory L0.
  std::optional<double> tau_r;
  /// min |lambda| outside the kernel cluster.
  double gap = 0.0;
  /// Kernel cluster tolerance actually used.
  double cluster_tol = 0.0;
  /// ||L0 P0||_F, the nilpotent part at lambda = 0.
  double nilpotent_norm = 0.0;
  /// ||Y||_F of the block-decoupling Sylvester solution.
  double sylvester_norm = 0.0;
  std::vector<std::string> warnings;
};

/// Spectral projector onto ker L0 by ordered Schur decomposition.
///
/// Eigenvalues with |lambda| <= cluster_tol (default 1e-9 ||L0||_1) are moved
/// to the leading block; every other eigenvalue must satisfy
/// |lambda| > 10 cluster_tol. A nonzero nilpotent part at 0 is reported in
/// `warnings`, not rejected. Throws NumericalError when the cluster is not
/// separated or ||Y|| exceeds 1e12.
SsmData kernel_projector(const SuperOperator& l0, std::optional<double> cluster_tol = std::nullopt);

/// Cross-check path: exp(t L0) at t = 50 tau_R.
SuperOperator kernel_projector_by_evolution(const SuperOperator& l0, double tau_r);

struct SpectralCluster {
  cplx center;
  SuperOperator projector;
  SuperOperator nilpotent;
  Index multiplicity = 0;
};

/// L0 = sum_j (lambda_j P_j + D_j).
struct SpectralResolution {
  std::vector<SpectralCluster> clusters;

  /// Index of the cluster whose center is closest to `value`.
  std::size_t nearest(cplx value) const;
};

/// Clusters eigenvalues by single linkage at `cluster_tol` (default
/// 1e-6 ||L0||_1) and builds each P_j from an ordered Schur form. D_j is
/// (L0 - lambda_j) P_j, set to zero below 1e-8 ||L0||_1.
SpectralResolution spectral_resolution(const SuperOperator& l0, double cluster_tol = -1.0);

/// Reduced resolvent at cluster k:
///   S = -sum_{j != k} [ (-mu_j)^{-1} P_j + sum_{n=1}^{m_j - 1} (-mu_j)^{-n-1} D_j^n ],
/// with mu_j = lambda_j - lambda_k.
SuperOperator reduced_resolvent(const SpectralResolution& res, std::size_t at_cluster);

/// P0 K P0.
SuperOperator effective_generator(const SsmData& ssm, const SuperOperator& k);

/// sum_J W_J [ Tr_{d_J}(W_J^H x W_J) (x) 1_{d_J} / d_J ] W_J^H.
/// Throws ModelError when the blocks do not resolve the identity.
Operator commutant_projection(std::span<const AlgebraBlock> blocks, const Operator& x);

struct SecondOrderGenerator {
  SuperOperator generator;
  /// ||P0 K P0||_F; should vanish for the second-order regime.
  double first_order_norm = 0.0;
  std::optional<std::string> warning;
};

/// -P0 K S K P0. Warns (does not fail) when P0 K P0 is not negligible.
SecondOrderGenerator second_order_generator(const SsmData& ssm, const SuperOperator& k);

/// Spectral projector of L_T onto its `ssm_dim` eigenvalues of smallest
/// modulus (the lambda-group). Requires the next eigenvalue to sit at least
/// 10x the cluster radius away; throws NumericalError otherwise.
SuperOperator lambda_group_projector(const SuperOperator& l_t, Index ssm_dim);

/// First-order shift of the lambda-group projector: -(P0 K S + S K P0) / T.
SuperOperator first_order_projector_shift(const SsmData& ssm, const SuperOperator& k_tilde,
                                          double t_scale);

/// Kernel projector of L0 = -i[H0, .] computed from the spectrum of H0: the
/// pinching x -> sum_E Pi_E x Pi_E over energy eigenspaces. It is orthogonal
/// in the Hilbert-Schmidt sense, so range(P0) has an orthonormal basis of
/// rank-one operators |a><b| with a, b in one eigenspace.
class EnergyPinching {
 public:
  /// Energies within `tol` (default 1e-9 max(1, ||H0||)) share an eigenspace.
  explicit EnergyPinching(const Operator& h0, double tol = -1.0);

  Index dim() const { return dim_; }
  /// dim ker(-i[H0, .]) = sum_E (dim E)^2.
  Index rank() const;
  /// Smallest nonzero Bohr frequency |E - E'|.
  double gap() const { return gap_; }
  const std::vector<double>& levels() const { return levels_; }
  /// Orthonormal bases of the eigenspaces, one per level.
  const std::vector<Matrix>& eigenspaces() const { return spaces_; }
  /// Eigenspace of the level closest to `energy`.
  const Matrix& eigenspace_near(double energy) const;

  Operator apply(const Operator& x) const;
  std::vector<Matrix> kernel_basis() const;
  /// Dense d^2 x d^2 matrix; only sensible for small d.
  SuperOperator superoperator() const;

 private:
  Index dim_ = 0;
  std::vector<double> levels_;
  std::vector<Matrix> spaces_;
  double gap_ = 0.0;
};

}  // namespace ssmdyn
