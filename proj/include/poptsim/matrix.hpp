#pragma once

// Dense complex linear algebra for small Hilbert spaces.
//
// Conventions used throughout the library:
//   * row major storage, double precision, value semantics;
//   * bipartite product indices are (i, j) -> i * dim_b + j, so Alice owns
//     the slow index and |Phi> = (1/sqrt(d)) sum_i |i>|i> has support on the
//     entries i * d + i;
//   * transpose and conjugation always refer to this fixed computational
//     basis.

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "poptsim/errors.hpp"

namespace poptsim {

using Complex = std::complex<double>;
using Vector = std::vector<Complex>;

// Supported envelope for a single local dimension.
inline constexpr int kMaxLocalDim = 32;

class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1) {
      throw DimensionError("matrix dimensions must be positive");
    }
    data_.assign(static_cast<std::size_t>(rows) * cols, Complex(0.0, 0.0));
  }

  static Matrix zero(int rows, int cols) { return Matrix(rows, cols); }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Complex& operator()(int i, int j) {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }
  const Complex& operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }

  std::vector<Complex>& data() { return data_; }
  const std::vector<Complex>& data() const { return data_; }

  Matrix transpose() const {
    Matrix out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

  Matrix conj() const {
    Matrix out(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = std::conj(data_[k]);
    return out;
  }

  Matrix dagger() const { return transpose().conj(); }

  Complex trace() const {
    if (!square()) throw DimensionError("trace of a non-square matrix");
    Complex t = 0.0;
    for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const Complex& z : data_) s += std::norm(z);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (const Complex& z : data_) m = std::max(m, std::abs(z));
    return m;
  }

  // max_ij |A_ij - conj(A_ji)|; zero for exactly Hermitian matrices.
  double hermiticity_error() const {
    if (!square()) return frobenius_norm();
    double worst = 0.0;
    for (int i = 0; i < rows_; ++i)
      for (int j = i; j < cols_; ++j)
        worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return worst;
  }

  bool is_hermitian(double atol = 1e-12) const {
    return square() && hermiticity_error() <= atol * std::max(1.0, max_abs());
  }

  Matrix& operator+=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }

  Matrix& operator-=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }

  Matrix& operator*=(Complex s) {
    for (Complex& z : data_) z *= s;
    return *this;
  }

 private:
  void require_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw DimensionError("matrix shape mismatch: " + std::to_string(rows_) + "x" +
                           std::to_string(cols_) + " vs " + std::to_string(o.rows_) + "x" +
                           std::to_string(o.cols_));
    }
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<Complex> data_;
};

inline Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
inline Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
inline Matrix operator-(const Matrix& a) {
  Matrix out = a;
  return out *= Complex(-1.0, 0.0);
}
inline Matrix operator*(Matrix a, Complex s) { return a *= s; }
inline Matrix operator*(Complex s, Matrix a) { return a *= s; }
inline Matrix operator/(Matrix a, Complex s) { return a *= (1.0 / s); }

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matrix product shape mismatch");
  Matrix out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex(0.0, 0.0)) continue;
      for (int j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

inline Vector mat_vec(const Matrix& a, const Vector& v) {
  if (a.cols() != static_cast<int>(v.size())) throw DimensionError("mat_vec shape mismatch");
  Vector out(a.rows(), Complex(0.0, 0.0));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out[i] += a(i, j) * v[j];
  return out;
}

// <u|v>, conjugate linear in the first argument.
inline Complex vdot(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) throw DimensionError("vdot length mismatch");
  Complex s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += std::conj(u[k]) * v[k];
  return s;
}

inline double vnorm(const Vector& u) { return std::sqrt(std::abs(vdot(u, u))); }

// |u><v|
inline Matrix outer(const Vector& u, const Vector& v) {
  Matrix out(static_cast<int>(u.size()), static_cast<int>(v.size()));
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j) out(i, j) = u[i] * std::conj(v[j]);
  return out;
}

inline Matrix hermitian_part(const Matrix& a) {
  if (!a.square()) throw DimensionError("hermitian_part of a non-square matrix");
  Matrix out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
  return out;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("max_abs_diff shape mismatch");
  }
  double worst = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex(0.0, 0.0)) continue;
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

inline Vector kron(const Vector& u, const Vector& v) {
  Vector out(u.size() * v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i * v.size() + j] = u[i] * v[j];
  return out;
}

// Which factor of the product space gets traced out.
enum class Side { kA, kB };

inline Matrix partial_trace(const Matrix& w, int dim_a, int dim_b, Side traced) {
  if (!w.square() || w.rows() != dim_a * dim_b) {
    throw DimensionError("partial_trace: operator size does not match dims");
  }
  if (traced == Side::kB) {
    Matrix out(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int ip = 0; ip < dim_a; ++ip) {
        Complex s = 0.0;
        for (int j = 0; j < dim_b; ++j) s += w(i * dim_b + j, ip * dim_b + j);
        out(i, ip) = s;
      }
    return out;
  }
  Matrix out(dim_b, dim_b);
  for (int j = 0; j < dim_b; ++j)
    for (int jp = 0; jp < dim_b; ++jp) {
      Complex s = 0.0;
      for (int i = 0; i < dim_a; ++i) s += w(i * dim_b + j, i * dim_b + jp);
      out(j, jp) = s;
    }
  return out;
}

// Transpose of the Bob factor in the computational basis.
inline Matrix partial_transpose_bob(const Matrix& w, int dim_a, int dim_b) {
  if (!w.square() || w.rows() != dim_a * dim_b) {
    throw DimensionError("partial_transpose_bob: operator size does not match dims");
  }
  Matrix out(w.rows(), w.cols());
  for (int i = 0; i < dim_a; ++i)
    for (int ip = 0; ip < dim_a; ++ip)
      for (int j = 0; j < dim_b; ++j)
        for (int jp = 0; jp < dim_b; ++jp)
          out(i * dim_b + j, ip * dim_b + jp) = w(i * dim_b + jp, ip * dim_b + j);
  return out;
}

// |Phi> = (1/sqrt(d)) sum_i |i>|i>
inline Vector max_entangled(int d) {
  if (d < 1) throw DimensionError("max_entangled: dimension must be positive");
  Vector phi(static_cast<std::size_t>(d) * d, Complex(0.0, 0.0));
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) phi[static_cast<std::size_t>(i) * d + i] = amp;
  return phi;
}

// tr((Q (x) R) W) without forming the Kronecker product.
inline Complex product_expectation(const Matrix& w, int dim_a, int dim_b, const Matrix& q,
                                   const Matrix& r) {
  if (q.rows() != dim_a || q.cols() != dim_a || r.rows() != dim_b || r.cols() != dim_b ||
      w.rows() != dim_a * dim_b || !w.square()) {
    throw DimensionError("product_expectation shape mismatch");
  }
  Complex s = 0.0;
  for (int i = 0; i < dim_a; ++i)
    for (int ip = 0; ip < dim_a; ++ip) {
      const Complex qiip = q(i, ip);
      if (qiip == Complex(0.0, 0.0)) continue;
      for (int j = 0; j < dim_b; ++j)
        for (int jp = 0; jp < dim_b; ++jp)
          s += qiip * r(j, jp) * w(ip * dim_b + jp, i * dim_b + j);
    }
  return s;
}

// (1 (x) <beta|) W (1 (x) |beta>): the dim_a x dim_a operator Alice sees when
// Bob's side is contracted with a fixed vector.
inline Matrix contract_bob(const Matrix& w, int dim_a, int dim_b, const Vector& beta) {
  if (w.rows() != dim_a * dim_b || !w.square() || static_cast<int>(beta.size()) != dim_b) {
    throw DimensionError("contract_bob shape mismatch");
  }
  Matrix out(dim_a, dim_a);
  for (int i = 0; i < dim_a; ++i)
    for (int ip = 0; ip < dim_a; ++ip) {
      Complex s = 0.0;
      for (int j = 0; j < dim_b; ++j)
        for (int jp = 0; jp < dim_b; ++jp)
          s += std::conj(beta[j]) * w(i * dim_b + j, ip * dim_b + jp) * beta[jp];
      out(i, ip) = s;
    }
  return out;
}

// (<alpha| (x) 1) W (|alpha> (x) 1)
inline Matrix contract_alice(const Matrix& w, int dim_a, int dim_b, const Vector& alpha) {
  if (w.rows() != dim_a * dim_b || !w.square() || static_cast<int>(alpha.size()) != dim_a) {
    throw DimensionError("contract_alice shape mismatch");
  }
  Matrix out(dim_b, dim_b);
  for (int j = 0; j < dim_b; ++j)
    for (int jp = 0; jp < dim_b; ++jp) {
      Complex s = 0.0;
      for (int i = 0; i < dim_a; ++i)
        for (int ip = 0; ip < dim_a; ++ip)
          s += std::conj(alpha[i]) * w(i * dim_b + j, ip * dim_b + jp) * alpha[ip];
      out(j, jp) = s;
    }
  return out;
}

// tr_B((1 (x) R) sigma)
inline Matrix conditional_alice(const Matrix& sigma, int dim_a, int dim_b, const Matrix& r) {
  if (sigma.rows() != dim_a * dim_b || !sigma.square() || r.rows() != dim_b || !r.square()) {
    throw DimensionError("conditional_alice shape mismatch");
  }
  Matrix out(dim_a, dim_a);
  for (int i = 0; i < dim_a; ++i)
    for (int ip = 0; ip < dim_a; ++ip) {
      Complex s = 0.0;
      for (int j = 0; j < dim_b; ++j)
        for (int jp = 0; jp < dim_b; ++jp) s += r(j, jp) * sigma(i * dim_b + jp, ip * dim_b + j);
      out(i, ip) = s;
    }
  return out;
}

// tr_A((Q (x) 1) sigma)
inline Matrix conditional_bob(const Matrix& sigma, int dim_a, int dim_b, const Matrix& q) {
  if (sigma.rows() != dim_a * dim_b || !sigma.square() || q.rows() != dim_a || !q.square()) {
    throw DimensionError("conditional_bob shape mismatch");
  }
  Matrix out(dim_b, dim_b);
  for (int j = 0; j < dim_b; ++j)
    for (int jp = 0; jp < dim_b; ++jp) {
      Complex s = 0.0;
      for (int i = 0; i < dim_a; ++i)
        for (int ip = 0; ip < dim_a; ++ip) s += q(i, ip) * sigma(ip * dim_b + j, i * dim_b + jp);
      out(j, jp) = s;
    }
  return out;
}

// Orthonormal Hermitian basis of the n x n matrices under <A, B> = tr(A B).
// Element 0 is I/sqrt(n); elements 1..n-1 are the diagonal traceless ones;
// the rest are the off-diagonal symmetric and antisymmetric pairs.
inline std::vector<Matrix> hermitian_basis(int n) {
  std::vector<Matrix> basis;
  basis.reserve(static_cast<std::size_t>(n) * n);
  basis.push_back(Matrix::identity(n) * Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
  for (int m = 1; m < n; ++m) {
    Matrix h(n, n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(m) * (m + 1));
    for (int i = 0; i < m; ++i) h(i, i) = norm;
    h(m, m) = -static_cast<double>(m) * norm;
    basis.push_back(h);
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Matrix x(n, n);
      x(i, j) = inv_sqrt2;
      x(j, i) = inv_sqrt2;
      basis.push_back(x);
      Matrix y(n, n);
      y(i, j) = Complex(0.0, -inv_sqrt2);
      y(j, i) = Complex(0.0, inv_sqrt2);
      basis.push_back(y);
    }
  return basis;
}

}  // namespace poptsim
