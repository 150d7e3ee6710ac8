#pragma once

// Real dense least squares via Householder QR. Solves min ||A x - b||_2 for
// A with at least as many rows as columns; rank deficiency is reported as
// FrameSingularError since every caller here is inverting a measurement
// frame.

#include <cmath>
#include <string>
#include <vector>

#include "poptsim/errors.hpp"

namespace poptsim {

struct LstsqResult {
  std::vector<double> x;
  double residual_inf = 0.0;  // max_i |(A x - b)_i|
};

inline LstsqResult lstsq_solve(int nrows, int ncols, const std::vector<double>& a_rowmajor,
                               const std::vector<double>& b, double rank_rtol = 1e-10) {
  if (nrows < ncols) throw DimensionError("lstsq_solve: system is underdetermined");
  if (static_cast<int>(a_rowmajor.size()) != nrows * ncols ||
      static_cast<int>(b.size()) != nrows) {
    throw DimensionError("lstsq_solve: inconsistent shapes");
  }

  std::vector<double> r = a_rowmajor;  // becomes R in place
  std::vector<double> qtb = b;
  std::vector<double> v(nrows);

  for (int k = 0; k < ncols; ++k) {
    double norm_sq = 0.0;
    for (int i = k; i < nrows; ++i) {
      v[i] = r[static_cast<std::size_t>(i) * ncols + k];
      norm_sq += v[i] * v[i];
    }
    const double norm = std::sqrt(norm_sq);
    if (norm == 0.0) continue;  // caught by the rank check below
    const double alpha = (v[k] >= 0.0) ? -norm : norm;
    v[k] -= alpha;
    double vnorm_sq = norm_sq - 2.0 * alpha * r[static_cast<std::size_t>(k) * ncols + k] +
                      alpha * alpha;
    if (vnorm_sq <= 0.0) {
      r[static_cast<std::size_t>(k) * ncols + k] = alpha;
      for (int i = k + 1; i < nrows; ++i) r[static_cast<std::size_t>(i) * ncols + k] = 0.0;
      continue;
    }
    // reflect the remaining columns and the right-hand side
    for (int j = k; j < ncols; ++j) {
      double dot = 0.0;
      for (int i = k; i < nrows; ++i) dot += v[i] * r[static_cast<std::size_t>(i) * ncols + j];
      const double f = 2.0 * dot / vnorm_sq;
      for (int i = k; i < nrows; ++i) r[static_cast<std::size_t>(i) * ncols + j] -= f * v[i];
    }
    double dot_b = 0.0;
    for (int i = k; i < nrows; ++i) dot_b += v[i] * qtb[i];
    const double fb = 2.0 * dot_b / vnorm_sq;
    for (int i = k; i < nrows; ++i) qtb[i] -= fb * v[i];
  }

  double max_diag = 0.0;
  for (int k = 0; k < ncols; ++k) {
    max_diag = std::max(max_diag, std::abs(r[static_cast<std::size_t>(k) * ncols + k]));
  }
  for (int k = 0; k < ncols; ++k) {
    if (std::abs(r[static_cast<std::size_t>(k) * ncols + k]) <
        rank_rtol * std::max(max_diag, 1e-300)) {
      throw FrameSingularError("lstsq_solve: rank-deficient system (column " +
                               std::to_string(k) + ")");
    }
  }

  LstsqResult out;
  out.x.assign(ncols, 0.0);
  for (int k = ncols - 1; k >= 0; --k) {
    double s = qtb[k];
    for (int j = k + 1; j < ncols; ++j) s -= r[static_cast<std::size_t>(k) * ncols + j] * out.x[j];
    out.x[k] = s / r[static_cast<std::size_t>(k) * ncols + k];
  }

  for (int i = 0; i < nrows; ++i) {
    double s = -b[i];
    for (int j = 0; j < ncols; ++j) s += a_rowmajor[static_cast<std::size_t>(i) * ncols + j] * out.x[j];
    out.residual_inf = std::max(out.residual_inf, std::abs(s));
  }
  return out;
}

}  // namespace poptsim
