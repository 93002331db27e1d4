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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

/// Dense complex kernels shared by every other module.
///
/// Vectorization convention (repo-wide): column stacking, so that
///
///     vec(A X B) = (B^T (x) A) vec(X).
///
/// Every superoperator builder in this library is written against this rule.
namespace ssmdyn {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr cplx kI{0.0, 1.0};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid model or input (bad dimensions, non-Hermitian Hamiltonian, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not deliver its contract.
class NumericalError : public Error {
 public:
  using Error::Error;
};

bool all_finite(const Matrix& m);

/// Operator on a d-dimensional Hilbert space. Square with finite entries.
class Operator {
 public:
  Operator() = default;
  explicit Operator(Matrix m);

  static Operator identity(Index dim);
  static Operator zero(Index dim);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

  Operator adjoint() const { return Operator(Matrix(m_.adjoint())); }
  bool is_hermitian(double tol) const;

  Operator& operator+=(const Operator& o);
  Operator& operator-=(const Operator& o);
  Operator& operator*=(cplx s);

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator*(cplx s, Operator a) { return a *= s; }
  friend Operator operator*(double s, Operator a) { return a *= cplx(s, 0.0); }

 private:
  Matrix m_;
};

/// Linear map on L(H) realised as a d^2 x d^2 matrix under column stacking.
class SuperOperator {
 public:
  SuperOperator() = default;
  explicit SuperOperator(Matrix m);

  static SuperOperator identity(Index dim);
  static SuperOperator zero(Index dim);

  /// Hilbert-space dimension d.
  Index dim() const { return dim_; }
  /// Matrix side length d^2.
  Index size() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

  Operator apply(const Operator& x) const;

  SuperOperator& operator+=(const SuperOperator& o);
  SuperOperator& operator-=(const SuperOperator& o);
  SuperOperator& operator*=(cplx s);

  friend SuperOperator operator+(SuperOperator a, const SuperOperator& b) { return a += b; }
  friend SuperOperator operator-(SuperOperator a, const SuperOperator& b) { return a -= b; }
  friend SuperOperator operator*(const SuperOperator& a, const SuperOperator& b);
  friend SuperOperator operator*(cplx s, SuperOperator a) { return a *= s; }
  friend SuperOperator operator*(double s, SuperOperator a) { return a *= cplx(s, 0.0); }

 private:
  Matrix m_;
  Index dim_ = 0;
};

/// Column-stacked vectorization of a matrix.
Vector vec(const Matrix& x);
/// Inverse of vec for a d x d matrix.
Matrix unvec(const Vector& v, Index dim);

Matrix kron(const Matrix& a, const Matrix& b);

/// Matrix exponential by scaling and squaring with a diagonal Padé
/// approximant (degree 3..13 picked from the 1-norm). Throws ModelError on
/// non-finite input.
Matrix expm(const Matrix& m);

struct EigenDecomposition {
  Vector values;
  /// Columns are right eigenvectors.
  Matrix right;
  /// Columns are left eigenvectors w_k, normalised so that W^H V = I.
  Matrix left;
  /// 2-norm condition number of the right eigenvector matrix.
  double condition = 0.0;
};

/// Eigendecomposition of a general complex matrix. Throws NumericalError if
/// the QR iteration does not converge or the eigenvectors are singular.
EigenDecomposition eig(const Matrix& m);

/// Largest singular value (the spectral norm), via a divide-and-conquer SVD.
double svd_max(const Matrix& m);

/// Largest singular value by power iteration on m^H m. Independent of
/// svd_max; used to cross-check the norm path.
double svd_max_power(const Matrix& m, double rel_tol = 1e-14, int max_iter = 20000);

}  // namespace ssmdyn
