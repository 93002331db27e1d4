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

#include "ssmdyn/spin_ops.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace ssmdyn {

namespace {

// S^2 eigenvalues are J(J+1) and integer-spaced in that unit.
constexpr double kSpinClusterTol = 1e-8;

struct EigenCluster {
  double value;
  Matrix vectors;
};

// Groups the spectrum of a Hermitian matrix into clusters of (nearly) equal
// eigenvalues. Eigen returns eigenvalues sorted ascending.
std::vector<EigenCluster> hermitian_clusters(const Matrix& h, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("hermitian eigensolver failed");
  }
  const auto& w = solver.eigenvalues();
  const Matrix& v = solver.eigenvectors();
  std::vector<EigenCluster> out;
  Index start = 0;
  for (Index i = 1; i <= w.size(); ++i) {
    if (i == w.size() || w(i) - w(i - 1) > tol) {
      const Index count = i - start;
      out.push_back({w.segment(start, count).mean(), v.middleCols(start, count)});
      start = i;
    }
  }
  return out;
}

}  // namespace

SpinRegister::SpinRegister(int n_sites) : n_sites_(n_sites) {
  if (n_sites < 1 || n_sites > 30) {
    throw ModelError("SpinRegister: n_sites must be in [1, 30], got " + std::to_string(n_sites));
  }
}

Matrix pauli(Axis axis) {
  Matrix m = Matrix::Zero(2, 2);
  switch (axis) {
    case Axis::x:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case Axis::y:
      m(0, 1) = -kI;
      m(1, 0) = kI;
      break;
    case Axis::z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
  }
  return m;
}

Operator site_pauli(const SpinRegister& reg, int site, Axis axis) {
  if (site < 1 || site > reg.n_sites()) {
    throw ModelError("site_pauli: site " + std::to_string(site) + " out of range [1, " +
                     std::to_string(reg.n_sites()) + "]");
  }
  const Index left = Index{1} << (site - 1);
  const Index right = Index{1} << (reg.n_sites() - site);
  const Matrix p = pauli(axis);
  // I_left (x) p (x) I_right, built directly to avoid two Kronecker passes.
  const Index d = reg.hilbert_dim();
  Matrix out = Matrix::Zero(d, d);
  for (Index l = 0; l < left; ++l) {
    for (Index a = 0; a < 2; ++a) {
      for (Index b = 0; b < 2; ++b) {
        if (p(a, b) == cplx(0.0)) continue;
        for (Index r = 0; r < right; ++r) {
          out((l * 2 + a) * right + r, (l * 2 + b) * right + r) = p(a, b);
        }
      }
    }
  }
  return Operator(std::move(out));
}

Operator collective_spin(const SpinRegister& reg, Axis axis) {
  Operator s = Operator::zero(reg.hilbert_dim());
  for (int j = 1; j <= reg.n_sites(); ++j) {
    s += site_pauli(reg, j, axis);
  }
  return 0.5 * s;
}

Operator collective_lowering(const SpinRegister& reg) {
  return collective_spin(reg, Axis::x) - kI * collective_spin(reg, Axis::y);
}

Operator total_spin_squared(const SpinRegister& reg) {
  Operator out = Operator::zero(reg.hilbert_dim());
  for (Axis a : {Axis::x, Axis::y, Axis::z}) {
    const Operator s = collective_spin(reg, a);
    out += s * s;
  }
  return out;
}

Operator site_swap(const SpinRegister& reg, int site_a, int site_b) {
  const int n = reg.n_sites();
  if (site_a < 1 || site_a > n || site_b < 1 || site_b > n) {
    throw ModelError("site_swap: site out of range");
  }
  const Index d = reg.hilbert_dim();
  const int bit_a = n - site_a;
  const int bit_b = n - site_b;
  Matrix out = Matrix::Zero(d, d);
  for (Index s = 0; s < d; ++s) {
    const Index va = (s >> bit_a) & 1;
    const Index vb = (s >> bit_b) & 1;
    Index t = s & ~((Index{1} << bit_a) | (Index{1} << bit_b));
    t |= (vb << bit_a) | (va << bit_b);
    out(t, s) = 1.0;
  }
  return Operator(std::move(out));
}

std::vector<AlgebraBlock> total_spin_blocks(const SpinRegister& reg) {
  if (reg.n_sites() > 12) {
    throw ModelError("total_spin_blocks: dense decomposition limited to 12 sites");
  }
  const Matrix s2 = total_spin_squared(reg).matrix();
  const Matrix sz = collective_spin(reg, Axis::z).matrix();
  const Matrix lower = collective_lowering(reg).matrix();

  std::vector<AlgebraBlock> blocks;
  for (const auto& cluster : hermitian_clusters(s2, kSpinClusterTol)) {
    const double j = 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * cluster.value));
    const double twice_j = std::round(2.0 * j);
    if (std::abs(2.0 * j - twice_j) > 1e-6) {
      throw NumericalError("total_spin_blocks: S^2 eigenvalue " + std::to_string(cluster.value) +
                           " is not of the form J(J+1)");
    }
    const double jj = 0.5 * twice_j;
    const auto d = static_cast<Index>(twice_j) + 1;
    const Index k = cluster.vectors.cols();
    if (k % d != 0) {
      throw NumericalError("total_spin_blocks: cluster of size " + std::to_string(k) +
                           " not divisible by 2J+1 = " + std::to_string(d));
    }
    const Index n = k / d;

    // Highest-weight states: M = J inside the cluster.
    const Matrix w = cluster.vectors;
    const Matrix szw = w.adjoint() * sz * w;
    Matrix top;
    for (const auto& mc : hermitian_clusters(szw, kSpinClusterTol)) {
      if (std::abs(mc.value - jj) < 1e-6) top = w * mc.vectors;
    }
    if (top.cols() != n) {
      throw NumericalError("total_spin_blocks: could not resolve highest-weight states for J = " +
                           std::to_string(jj));
    }

    AlgebraBlock block;
    block.label = jj;
    block.multiplicity = n;
    block.block_dim = d;
    block.isometry = Matrix::Zero(reg.hilbert_dim(), n * d);
    for (Index a = 0; a < n; ++a) {
      Vector state = top.col(a);
      double m = jj;
      for (Index step = 0; step < d; ++step) {
        block.isometry.col(a * d + step) = state;
        if (step + 1 < d) {
          state = lower * state / std::sqrt(jj * (jj + 1.0) - m * (m - 1.0));
          m -= 1.0;
        }
      }
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

std::vector<AlgebraBlock> eigenspace_blocks(const Operator& generator, double tol) {
  if (!generator.is_hermitian(1e-12)) {
    throw ModelError("eigenspace_blocks: generator must be Hermitian");
  }
  std::vector<AlgebraBlock> blocks;
  for (auto& c : hermitian_clusters(generator.matrix(), tol)) {
    AlgebraBlock b;
    b.label = c.value;
    b.multiplicity = c.vectors.cols();
    b.block_dim = 1;
    b.isometry = std::move(c.vectors);
    blocks.push_back(std::move(b));
  }
  return blocks;
}

Operator dfs_gate_hamiltonian(const SpinRegister& reg, Axis axis) {
  if (reg.n_sites() < 3) throw ModelError("dfs_gate_hamiltonian: needs at least 3 sites");
  const Operator z1 = site_pauli(reg, 1, Axis::z);
  const Operator z2 = site_pauli(reg, 2, Axis::z);
  const Operator z3 = site_pauli(reg, 3, Axis::z);
  const Operator id = Operator::identity(reg.hilbert_dim());
  switch (axis) {
    case Axis::x:
      return 1.5 * (z1 * z2 + z2 * z3) + id;
    case Axis::z:
      return -0.5 * std::sqrt(3.0) * (z1 * z2 - z2 * z3) + z1;
    case Axis::y:
      break;
  }
  throw ModelError("dfs_gate_hamiltonian: only x and z gates are defined");
}

LogicalQubit logical_basis_j0(const SpinRegister& reg) {
  if (reg.n_sites() != 4) throw ModelError("logical_basis_j0: requires N = 4");
  const auto blocks = total_spin_blocks(reg);
  const AlgebraBlock* singlet = nullptr;
  for (const auto& b : blocks) {
    if (b.label == 0.0) singlet = &b;
  }
  if (singlet == nullptr || singlet->multiplicity != 2) {
    throw NumericalError("logical_basis_j0: J = 0 block with multiplicity 2 not found");
  }
  const Matrix& iso = singlet->isometry;

  const Matrix hz = iso.adjoint() * dfs_gate_hamiltonian(reg, Axis::z).matrix() * iso;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hz);
  const auto& w = solver.eigenvalues();
  if (w(1) - w(0) < 1e-6) {
    throw NumericalError("logical_basis_j0: Pi H^z Pi has no gap inside the J = 0 subspace");
  }
  LogicalQubit q;
  q.zero = iso * solver.eigenvectors().col(1);
  q.one = iso * solver.eigenvectors().col(0);

  const cplx c = q.zero.dot(dfs_gate_hamiltonian(reg, Axis::x).matrix() * q.one);
  if (std::abs(c) < 1e-8) {
    throw NumericalError("logical_basis_j0: <0_L|H^x|1_L> vanishes, phase cannot be fixed");
  }
  q.one *= std::conj(c) / std::abs(c);

  q.basis = Matrix(reg.hilbert_dim(), 2);
  q.basis.col(0) = q.zero;
  q.basis.col(1) = q.one;
  q.projector = Operator(Matrix(q.basis * q.basis.adjoint()));
  return q;
}

}  // namespace ssmdyn
