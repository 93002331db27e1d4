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

#include <span>
#include <vector>

#include "ssmdyn/tensor.hpp"

/// Superoperator builders. All formulas use column stacking,
/// vec(A X B) = (B^T (x) A) vec(X).
namespace ssmdyn {

struct HamiltonianTerm {
  Operator op;
  double coefficient = 1.0;
};

struct LindbladTerm {
  Operator op;
  double rate = 0.0;
};

struct KrausTerm {
  Operator op;
  double weight = 0.0;
};

/// Generator L0 = -i[H, .] + sum_i rate_i D[L_i] + (Phi - id), plus the
/// perturbation K~ entering as (strength / scale) * (-i[K~, .]).
struct LiouvillianModel {
  Index dim = 0;
  std::vector<HamiltonianTerm> hamiltonian_terms;
  std::vector<LindbladTerm> lindblad_terms;
  std::vector<KrausTerm> kraus_terms;
  Operator perturbation;
  double strength = 1.0;
  double scale = 1.0;

  /// Throws ModelError when dimensions, rates or Kraus weights are invalid.
  void validate() const;
};

/// Matrix of -i[h, .]: -i (I (x) h - h^T (x) I). Rejects non-Hermitian h
/// (tolerance 1e-12).
SuperOperator hamiltonian_superop(const Operator& h);

/// sum_i g_i [ conj(L_i) (x) L_i - 1/2 I (x) L_i^H L_i - 1/2 (L_i^H L_i)^T (x) I ].
/// An empty term list yields the zero superoperator on `dim`.
SuperOperator lindblad_superop(std::span<const LindbladTerm> terms, Index dim);

/// sum_i p_i conj(A_i) (x) A_i - I, i.e. Phi - id. Weights must sum to 1.
SuperOperator kraus_generator(std::span<const KrausTerm> terms);

struct AssembledModel {
  SuperOperator l0;
  /// strength * (-i[K~, .]), not yet divided by the scale.
  SuperOperator k_superop;
  /// l0 + k_superop / scale.
  SuperOperator l_t;
};

struct AssembleOptions {
  /// Check Re(lambda) <= spectral_tol * max(1, ||L0||) for every eigenvalue of L0.
  bool validate_spectrum = true;
  double spectral_tol = 1e-10;
};

AssembledModel assemble(const LiouvillianModel& model, const AssembleOptions& options = {});

/// tau_R = 1 / min |Re lambda| over eigenvalues outside the kernel cluster
/// (|lambda| <= cluster_tol). Default tolerance is 1e-9 * ||L0||. Throws
/// NumericalError when every non-kernel eigenvalue is purely imaginary.
double relaxation_time(const SuperOperator& l0, double cluster_tol = -1.0);

/// 1-norm based scale of a superoperator, used for relative tolerances.
double superop_scale(const SuperOperator& s);

}  // namespace ssmdyn
