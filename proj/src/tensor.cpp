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

#include "ssmdyn/tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace ssmdyn {

bool all_finite(const Matrix& m) {
  return m.allFinite();
}

// ---------------------------------------------------------------------------
// Operator / SuperOperator

Operator::Operator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw ModelError("Operator must be square");
  }
  if (m_.rows() == 0) {
    throw ModelError("Operator dimension must be positive");
  }
  if (!all_finite(m_)) {
    throw ModelError("Operator has non-finite entries");
  }
}

Operator Operator::identity(Index dim) {
  return Operator(Matrix::Identity(dim, dim));
}

Operator Operator::zero(Index dim) {
  return Operator(Matrix::Zero(dim, dim));
}

bool Operator::is_hermitian(double tol) const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Operator& Operator::operator+=(const Operator& o) {
  if (o.dim() != dim()) throw ModelError("Operator dimension mismatch in +");
  m_ += o.m_;
  return *this;
}

Operator& Operator::operator-=(const Operator& o) {
  if (o.dim() != dim()) throw ModelError("Operator dimension mismatch in -");
  m_ -= o.m_;
  return *this;
}

Operator& Operator::operator*=(cplx s) {
  m_ *= s;
  return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
  if (a.dim() != b.dim()) throw ModelError("Operator dimension mismatch in *");
  return Operator(Matrix(a.m_ * b.m_));
}

namespace {

Index exact_sqrt(Index n) {
  auto r = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
  return r * r == n ? r : -1;
}

}  // namespace

SuperOperator::SuperOperator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw ModelError("SuperOperator must be square");
  }
  dim_ = exact_sqrt(m_.rows());
  if (dim_ <= 0) {
    throw ModelError("SuperOperator side length must be a positive perfect square");
  }
  if (!all_finite(m_)) {
    throw ModelError("SuperOperator has non-finite entries");
  }
}

SuperOperator SuperOperator::identity(Index dim) {
  return SuperOperator(Matrix::Identity(dim * dim, dim * dim));
}

SuperOperator SuperOperator::zero(Index dim) {
  return SuperOperator(Matrix::Zero(dim * dim, dim * dim));
}

Operator SuperOperator::apply(const Operator& x) const {
  if (x.dim() != dim_) throw ModelError("SuperOperator::apply dimension mismatch");
  return Operator(unvec(m_ * vec(x.matrix()), dim_));
}

SuperOperator& SuperOperator::operator+=(const SuperOperator& o) {
  if (o.size() != size()) throw ModelError("SuperOperator dimension mismatch in +");
  m_ += o.m_;
  return *this;
}

SuperOperator& SuperOperator::operator-=(const SuperOperator& o) {
  if (o.size() != size()) throw ModelError("SuperOperator dimension mismatch in -");
  m_ -= o.m_;
  return *this;
}

SuperOperator& SuperOperator::operator*=(cplx s) {
  m_ *= s;
  return *this;
}

SuperOperator operator*(const SuperOperator& a, const SuperOperator& b) {
  if (a.size() != b.size()) throw ModelError("SuperOperator dimension mismatch in *");
  return SuperOperator(Matrix(a.m_ * b.m_));
}

// ---------------------------------------------------------------------------
// vectorization and Kronecker product

Vector vec(const Matrix& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

Matrix unvec(const Vector& v, Index dim) {
  if (v.size() != dim * dim) throw ModelError("unvec: length is not dim^2");
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  const Index br = b.rows();
  const Index bc = b.cols();
  Matrix out(a.rows() * br, a.cols() * bc);
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      out.block(i * br, j * bc, br, bc) = a(i, j) * b;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// expm

namespace {

// Backward-error thresholds for the [m/m] Padé approximants, m = 3,5,7,9,13.
constexpr std::array<double, 5> kTheta = {1.495585217958292e-2, 2.539398330063230e-1,
                                          9.504178996162932e-1, 2.097847961257068e0,
                                          5.371920351148152e0};

constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                           302702400.0,   30270240.0,   2162160.0,
                                           110880.0,      3960.0,       90.0,
                                           1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

double norm1(const Matrix& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

// Low-degree approximant: U = A * sum b_{2k+1} A^{2k}, V = sum b_{2k} A^{2k}.
template <std::size_t N>
void pade_low(const Matrix& a, const std::array<double, N>& b, Matrix& u, Matrix& v) {
  const Index n = a.rows();
  const Matrix a2 = a * a;
  Matrix power = Matrix::Identity(n, n);
  Matrix odd = Matrix::Zero(n, n);
  Matrix even = Matrix::Zero(n, n);
  for (std::size_t k = 0; 2 * k + 1 < N; ++k) {
    even += b[2 * k] * power;
    odd += b[2 * k + 1] * power;
    if (2 * k + 3 < N) power = power * a2;
  }
  u = a * odd;
  v = even;
}

void pade13(const Matrix& a, Matrix& u, Matrix& v) {
  const auto& b = kPade13;
  const Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  Matrix tmp = b[13] * a6 + b[11] * a4 + b[9] * a2;
  Matrix inner = a6 * tmp;
  inner += b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  u = a * inner;
  tmp = b[12] * a6 + b[10] * a4 + b[8] * a2;
  v = a6 * tmp;
  v += b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

}  // namespace

Matrix expm(const Matrix& m) {
  if (m.rows() != m.cols()) throw ModelError("expm: matrix must be square");
  if (!all_finite(m)) throw ModelError("expm: non-finite input");
  const Index n = m.rows();
  if (n == 0) return m;

  const double norm = norm1(m);
  Matrix u;
  Matrix v;
  int squarings = 0;
  if (norm <= kTheta[0]) {
    pade_low(m, kPade3, u, v);
  } else if (norm <= kTheta[1]) {
    pade_low(m, kPade5, u, v);
  } else if (norm <= kTheta[2]) {
    pade_low(m, kPade7, u, v);
  } else if (norm <= kTheta[3]) {
    pade_low(m, kPade9, u, v);
  } else {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta[4]))));
    const Matrix scaled = m / std::ldexp(1.0, squarings);
    pade13(scaled, u, v);
  }

  Matrix result = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < squarings; ++k) {
    result = result * result;
  }
  if (!all_finite(result)) throw NumericalError("expm: overflow in scaling and squaring");
  return result;
}

// ---------------------------------------------------------------------------
// eig / svd

EigenDecomposition eig(const Matrix& m) {
  if (m.rows() != m.cols()) throw ModelError("eig: matrix must be square");
  if (!all_finite(m)) throw ModelError("eig: non-finite input");
  Eigen::ComplexEigenSolver<Matrix> solver(m, true);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eig: QR iteration failed to converge");
  }
  EigenDecomposition out;
  out.values = solver.eigenvalues();
  out.right = solver.eigenvectors();

  Eigen::BDCSVD<Matrix> svd(out.right);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0.0)) {
    throw NumericalError("eig: eigenvector matrix is singular (defective input)");
  }
  out.condition = sv(0) / smin;
  out.left = out.right.inverse().adjoint();
  return out;
}

double svd_max(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (!all_finite(m)) throw ModelError("svd_max: non-finite input");
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double svd_max_power(const Matrix& m, double rel_tol, int max_iter) {
  if (m.size() == 0) return 0.0;
  if (!all_finite(m)) throw ModelError("svd_max_power: non-finite input");
  // Deterministic, generic start vector.
  Vector x(m.cols());
  for (Index i = 0; i < x.size(); ++i) {
    x(i) = cplx(1.0 + 0.37 * std::sin(1.0 + i), 0.21 * std::cos(2.0 + 3.0 * i));
  }
  x.normalize();
  double sigma2 = 0.0;
  int stable = 0;
  for (int it = 0; it < max_iter; ++it) {
    Vector y = m.adjoint() * (m * x);
    const double next = y.norm();
    if (next == 0.0) return 0.0;
    x = y / next;
    if (std::abs(next - sigma2) <= rel_tol * next) {
      if (++stable >= 3) {
        sigma2 = next;
        break;
      }
    } else {
      stable = 0;
    }
    sigma2 = next;
  }
  return std::sqrt(sigma2);
}

}  // namespace ssmdyn
