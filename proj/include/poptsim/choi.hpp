#pragma once

// Choi correspondence between bipartite operators and matrix maps, and the
// unital decomposition that turns a positive map into a measurement
// relabeling plus a quantum state.
//
// A map is stored as the full array of images of matrix units,
// units[i * din + j] = map(|i><j|). With the normalized |Phi>, the Choi
// state of a map is W = (1/d) sum_ij |i><j| (x) units[i][j], and conversely
// units[i][j] = d * (<i| (x) 1) W (|j> (x) 1). This representation is exact
// and keeps every basis convention explicit.

#include <cmath>
#include <string>
#include <vector>

#include "poptsim/eigh.hpp"
#include "poptsim/errors.hpp"
#include "poptsim/matrix.hpp"
#include "poptsim/popt.hpp"

namespace poptsim {

// Eigenvalues of the trace-normalized image of the identity below this are
// treated as zero; inverting across it is numerically meaningless.
inline constexpr double kInvCutoff = 1e-10;
inline constexpr double kUnitalityTol = 1e-8;

struct MatrixMap {
  int din = 0;
  int dout = 0;
  std::vector<Matrix> units;  // units[i * din + j] = map(|i><j|)

  const Matrix& unit(int i, int j) const { return units[static_cast<std::size_t>(i) * din + j]; }
  Matrix& unit(int i, int j) { return units[static_cast<std::size_t>(i) * din + j]; }
};

struct UnitalDecomposition {
  Matrix m;           // image of the identity (of the regularized map when epsilon > 0)
  MatrixMap wtilde;   // unital part M^{-1/2} map(.) M^{-1/2}
  double epsilon = 0.0;
};

// max over (i, j) of ||units[j][i] - units[i][j]^dagger||; zero iff the map
// sends Hermitian inputs to Hermitian outputs.
inline double hermiticity_preservation_error(const MatrixMap& m) {
  double worst = 0.0;
  for (int i = 0; i < m.din; ++i)
    for (int j = 0; j < m.din; ++j)
      worst = std::max(worst, max_abs_diff(m.unit(j, i), m.unit(i, j).dagger()));
  return worst;
}

inline Matrix apply_map(const MatrixMap& m, const Matrix& x) {
  if (x.rows() != m.din || x.cols() != m.din) {
    throw DimensionError("apply_map: input must be din x din");
  }
  Matrix out(m.dout, m.dout);
  for (int i = 0; i < m.din; ++i)
    for (int j = 0; j < m.din; ++j) {
      const Complex xij = x(i, j);
      if (xij == Complex(0.0, 0.0)) continue;
      const Matrix& u = m.unit(i, j);
      for (int k = 0; k < m.dout; ++k)
        for (int l = 0; l < m.dout; ++l) out(k, l) += xij * u(k, l);
    }
  return out;
}

// The unique map with tr(map(X) Y) = tr(X adjoint(Y)) for all X:
// adjoint(Y)[j][i] = tr(units[i][j] Y).
inline Matrix adjoint_apply(const MatrixMap& m, const Matrix& y) {
  if (y.rows() != m.dout || y.cols() != m.dout) {
    throw DimensionError("adjoint_apply: input must be dout x dout");
  }
  Matrix out(m.din, m.din);
  for (int i = 0; i < m.din; ++i)
    for (int j = 0; j < m.din; ++j) {
      const Matrix& u = m.unit(i, j);
      Complex s = 0.0;
      for (int k = 0; k < m.dout; ++k)
        for (int l = 0; l < m.dout; ++l) s += u(k, l) * y(l, k);
      out(j, i) = s;
    }
  return out;
}

// units[i][j] = d * (<i| (x) 1) W (|j> (x) 1), so that the Choi state of the
// map is exactly W.
inline MatrixMap map_from_popt(const PoptState& state) {
  if (state.dim_a != state.dim_b) {
    throw DimensionError("map_from_popt: equal local dimensions required");
  }
  const int d = state.dim_a;
  MatrixMap map;
  map.din = d;
  map.dout = d;
  map.units.reserve(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Matrix u(d, d);
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          u(k, l) = static_cast<double>(d) * state.w(i * d + k, j * d + l);
      map.units.push_back(u);
    }
  return map;
}

// Inverse of map_from_popt: assemble (1/d) sum_ij |i><j| (x) units[i][j].
inline Matrix popt_from_map(const MatrixMap& m) {
  if (m.din != m.dout) throw DimensionError("popt_from_map: din must equal dout");
  const int d = m.din;
  Matrix w(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Matrix& u = m.unit(i, j);
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          w(i * d + k, j * d + l) = u(k, l) / static_cast<double>(d);
    }
  return w;
}

// Split a positive map into M = map(1) and the unital part
// wtilde(.) = M^{-1/2} map(.) M^{-1/2}. With epsilon > 0 the map is first
// blended with the trace channel, map_eps(X) = (1-eps) map(X) + eps tr(X) 1/d,
// which keeps tr(M_eps)/d = 1 and has the original map as its eps -> 0 limit.
// A singular M with epsilon = 0 raises SingularMError.
inline UnitalDecomposition unital_decompose(const MatrixMap& m, double epsilon = 0.0) {
  if (m.din != m.dout) throw DimensionError("unital_decompose: din must equal dout");
  if (epsilon < 0.0) throw Error("unital_decompose: epsilon must be >= 0");
  const int d = m.din;

  MatrixMap reg = m;
  if (epsilon > 0.0) {
    const Matrix bump = Matrix::identity(d) * Complex(epsilon / static_cast<double>(d), 0.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        reg.unit(i, j) *= Complex(1.0 - epsilon, 0.0);
        if (i == j) reg.unit(i, j) += bump;
      }
  }

  const Matrix image_of_identity = hermitian_part(apply_map(reg, Matrix::identity(d)));
  const Matrix inv_sqrt = psd_inv_sqrt(image_of_identity, kInvCutoff);

  UnitalDecomposition dec;
  dec.m = image_of_identity;
  dec.epsilon = epsilon;
  dec.wtilde.din = d;
  dec.wtilde.dout = d;
  dec.wtilde.units.reserve(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) dec.wtilde.units.push_back(inv_sqrt * reg.unit(i, j) * inv_sqrt);

  const double unitality =
      max_abs_diff(apply_map(dec.wtilde, Matrix::identity(d)), Matrix::identity(d));
  if (unitality > kUnitalityTol) {
    throw Error("unital_decompose: unital part failed its identity check (" +
                std::to_string(unitality) + ")");
  }
  return dec;
}

}  // namespace poptsim
