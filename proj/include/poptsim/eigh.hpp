#pragma once

// Hermitian eigendecomposition via cyclic Jacobi, plus the spectral matrix
// functions built on it. Jacobi is unconditionally stable and has no
// dependencies; the supported envelope (local dimension <= 32) keeps the
// O(n^3)-per-sweep cost irrelevant.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "poptsim/errors.hpp"
#include "poptsim/matrix.hpp"

namespace poptsim {

inline constexpr double kDefaultPsdTol = 1e-9;
inline constexpr double kDefaultHermitianAtol = 1e-12;

struct Eigh {
  std::vector<double> values;  // descending
  Matrix vectors;              // orthonormal columns, matching order
};

namespace detail {

// One complex Jacobi rotation annihilating w(p, q), accumulated into v.
inline void jacobi_rotate(Matrix& w, Matrix& v, int p, int q) {
  const Complex apq = w(p, q);
  const double abs_apq = std::abs(apq);
  if (abs_apq == 0.0) return;
  const Complex phase = apq / abs_apq;
  const double app = w(p, p).real();
  const double aqq = w(q, q).real();
  const double tau = (aqq - app) / (2.0 * abs_apq);
  // smaller-magnitude root of t^2 + 2 tau t - 1 = 0
  const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const int n = w.rows();
  // A <- A U with U = [[c, s e^{i phi}], [-s e^{-i phi}, c]] on (p, q)
  for (int k = 0; k < n; ++k) {
    const Complex akp = w(k, p);
    const Complex akq = w(k, q);
    w(k, p) = c * akp - s * std::conj(phase) * akq;
    w(k, q) = s * phase * akp + c * akq;
  }
  // A <- U^dagger A
  for (int k = 0; k < n; ++k) {
    const Complex apk = w(p, k);
    const Complex aqk = w(q, k);
    w(p, k) = c * apk - s * phase * aqk;
    w(q, k) = s * std::conj(phase) * apk + c * aqk;
  }
  w(p, q) = 0.0;
  w(q, p) = 0.0;
  w(p, p) = Complex(w(p, p).real(), 0.0);
  w(q, q) = Complex(w(q, q).real(), 0.0);
  for (int k = 0; k < n; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = c * vkp - s * std::conj(phase) * vkq;
    v(k, q) = s * phase * vkp + c * vkq;
  }
}

inline double off_diagonal_norm(const Matrix& w) {
  double s = 0.0;
  for (int p = 0; p < w.rows(); ++p)
    for (int q = p + 1; q < w.cols(); ++q) s += std::norm(w(p, q));
  return std::sqrt(2.0 * s);
}

}  // namespace detail

inline Eigh eigh(const Matrix& a, double hermitian_atol = kDefaultHermitianAtol) {
  if (!a.square()) throw DimensionError("eigh: matrix must be square");
  const int n = a.rows();
  if (n > kMaxLocalDim * kMaxLocalDim) {
    throw DimensionError("eigh: dimension exceeds the supported envelope");
  }
  const double scale = std::max(1.0, a.max_abs());
  if (a.hermiticity_error() > hermitian_atol * scale) {
    throw NotHermitianError("eigh: input is not Hermitian within tolerance");
  }

  Matrix w = hermitian_part(a);
  Matrix v = Matrix::identity(n);
  const double fro = std::max(w.frobenius_norm(), 1e-300);
  const int max_sweeps = 64;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    const double off = detail::off_diagonal_norm(w);
    if (off <= 1e-14 * fro) break;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(w(p, q)) > 1e-18 * fro) detail::jacobi_rotate(w, v, p, q);
      }
  }
  if (sweep == max_sweeps && detail::off_diagonal_norm(w) > 1e-10 * fro) {
    throw Error("eigh: Jacobi iteration failed to converge");
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return w(i, i).real() > w(j, j).real(); });

  Eigh out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = w(order[k], order[k]).real();
    for (int i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

inline Vector eig_column(const Eigh& e, int k) {
  Vector col(e.vectors.rows());
  for (int i = 0; i < e.vectors.rows(); ++i) col[i] = e.vectors(i, k);
  return col;
}

inline double lambda_max(const Matrix& a) { return eigh(a).values.front(); }
inline double lambda_min(const Matrix& a) { return eigh(a).values.back(); }

// Largest |eigenvalue|; the spectral norm for Hermitian input.
inline double spectral_norm(const Matrix& a) {
  const Eigh e = eigh(a);
  return std::max(std::abs(e.values.front()), std::abs(e.values.back()));
}

inline bool is_psd(const Matrix& a, double psd_tol = kDefaultPsdTol) {
  const Eigh e = eigh(a);
  const double scale = std::max(std::abs(e.values.front()), std::abs(e.values.back()));
  return e.values.back() >= -psd_tol * std::max(1e-300, scale);
}

namespace detail {

inline Matrix rebuild(const Eigh& e, const std::vector<double>& f) {
  const int n = e.vectors.rows();
  Matrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (int k = 0; k < n; ++k) s += f[k] * e.vectors(i, k) * std::conj(e.vectors(j, k));
      out(i, j) = s;
    }
  return out;
}

}  // namespace detail

// Square root of a PSD matrix. Eigenvalues in [-psd_tol * |A|, 0) are
// clamped to zero; anything more negative is rejected.
inline Matrix psd_sqrt(const Matrix& a, double psd_tol = kDefaultPsdTol) {
  const Eigh e = eigh(a);
  const double scale = std::max(std::abs(e.values.front()), std::abs(e.values.back()));
  std::vector<double> f(e.values.size());
  for (std::size_t k = 0; k < e.values.size(); ++k) {
    double lam = e.values[k];
    if (lam < -psd_tol * std::max(1e-300, scale)) {
      throw NotPsdError("psd_sqrt: eigenvalue " + std::to_string(lam) +
                        " is negative beyond tolerance");
    }
    f[k] = std::sqrt(std::max(0.0, lam));
  }
  return detail::rebuild(e, f);
}

// Inverse square root. Every eigenvalue must exceed the cutoff; a smaller
// one raises SingularMError so that callers pick the epsilon-regularized
// route instead of inverting noise.
inline Matrix psd_inv_sqrt(const Matrix& a, double cutoff) {
  const Eigh e = eigh(a);
  std::vector<double> f(e.values.size());
  for (std::size_t k = 0; k < e.values.size(); ++k) {
    const double lam = e.values[k];
    if (lam <= cutoff) {
      throw SingularMError("psd_inv_sqrt: eigenvalue " + std::to_string(lam) +
                           " is at or below the cutoff " + std::to_string(cutoff) +
                           "; retry with epsilon > 0");
    }
    f[k] = 1.0 / std::sqrt(lam);
  }
  return detail::rebuild(e, f);
}

}  // namespace poptsim
