#pragma once

// POVMs: validation, seeded random generation, informationally complete
// frames, and qubit projective settings. Outcome labels are list indices.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "poptsim/eigh.hpp"
#include "poptsim/errors.hpp"
#include "poptsim/matrix.hpp"
#include "poptsim/rng.hpp"

namespace poptsim {

inline constexpr double kCompletenessTol = 1e-9;

struct Povm {
  int dim = 0;
  std::vector<Matrix> elements;

  int outcomes() const { return static_cast<int>(elements.size()); }
};

struct PovmReport {
  bool ok = false;
  // largest negative part of any element eigenvalue (0 when all PSD)
  double worst_psd_violation = 0.0;
  // spectral norm of (sum of elements - identity)
  double completeness_residual = 0.0;
};

inline PovmReport validate_povm(const Povm& p, double psd_tol = kDefaultPsdTol,
                                double completeness_tol = kCompletenessTol) {
  PovmReport report;
  if (p.dim < 1 || p.elements.empty()) return report;
  Matrix sum(p.dim, p.dim);
  double worst = 0.0;
  for (const Matrix& e : p.elements) {
    if (e.rows() != p.dim || e.cols() != p.dim) {
      throw DimensionError("validate_povm: element size does not match dim");
    }
    const Eigh eig = eigh(e);
    worst = std::max(worst, std::max(0.0, -eig.values.back()));
    sum += e;
  }
  report.worst_psd_violation = worst;
  report.completeness_residual = spectral_norm(sum - Matrix::identity(p.dim));
  double psd_scale = 0.0;
  for (const Matrix& e : p.elements) psd_scale = std::max(psd_scale, e.max_abs());
  report.ok = worst <= psd_tol * std::max(1.0, psd_scale) &&
              report.completeness_residual <= completeness_tol;
  return report;
}

namespace detail {

inline constexpr std::uint64_t kPovmStream = 0x506f766dULL;       // "Povm"
inline constexpr std::uint64_t kIcPovmStream = 0x4963506fULL;     // "IcPo"

}  // namespace detail

// k random PSD blocks G_i^dagger G_i whitened by the inverse square root of
// their sum, so completeness is exact up to roundoff.
inline Povm random_povm_rng(int d, int k, Rng& rng) {
  if (d < 1 || k < 1) throw DimensionError("random_povm: d and k must be >= 1");
  std::vector<Matrix> blocks;
  blocks.reserve(k);
  Matrix sum(d, d);
  for (int i = 0; i < k; ++i) {
    blocks.push_back(random_psd(d, rng));
    sum += blocks.back();
  }
  const Matrix whiten = psd_inv_sqrt(sum, 1e-12 * lambda_max(sum));
  Povm povm;
  povm.dim = d;
  povm.elements.reserve(k);
  for (const Matrix& b : blocks) povm.elements.push_back(hermitian_part(whiten * b * whiten));
  return povm;
}

inline Povm random_povm(int d, int k, std::uint64_t seed) {
  Rng rng = derived_rng(seed, detail::kPovmStream);
  return random_povm_rng(d, k, rng);
}

// Real symmetric k x k matrix tr(E_i E_j).
inline Matrix frame_gram(const Povm& p) {
  const int k = p.outcomes();
  Matrix g(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      const Complex t = (p.elements[i] * p.elements[j]).trace();
      g(i, j) = t.real();
      g(j, i) = t.real();
    }
  return g;
}

// Dimension of the real span of the elements, via the Gram spectrum.
inline int frame_rank(const Povm& p, double rel_tol = 1e-10) {
  const Eigh e = eigh(frame_gram(p));
  const double top = std::max(e.values.front(), 1e-300);
  int rank = 0;
  for (double lam : e.values)
    if (lam > rel_tol * top) ++rank;
  return rank;
}

// lambda_max / lambda_min of the Gram matrix; infinity when singular.
inline double frame_condition(const Povm& p) {
  const Eigh e = eigh(frame_gram(p));
  if (e.values.back() <= 0.0) return std::numeric_limits<double>::infinity();
  return e.values.front() / e.values.back();
}

inline bool is_informationally_complete(const Povm& p) {
  return p.outcomes() >= p.dim * p.dim && frame_rank(p) == p.dim * p.dim;
}

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

inline Matrix pauli_y() {
  Matrix m(2, 2);
  m(0, 1) = Complex(0.0, -1.0);
  m(1, 0) = Complex(0.0, 1.0);
  return m;
}

inline Matrix pauli_z() {
  Matrix m(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

// Informationally complete POVM with exactly d^2 elements. d = 2 uses the
// tetrahedral construction E_i = (1 + s_i . sigma) / 4; d >= 3 draws random
// rank-one frames, rejecting until the Gram matrix is comfortably invertible.
inline Povm ic_povm(int d, std::uint64_t seed, int max_retries = 16) {
  if (d < 2) throw DimensionError("ic_povm: d must be >= 2");
  if (d == 2) {
    const double r = 1.0 / std::sqrt(3.0);
    const double s[4][3] = {{r, r, r}, {r, -r, -r}, {-r, r, -r}, {-r, -r, r}};
    Povm povm;
    povm.dim = 2;
    for (const auto& dir : s) {
      Matrix e = Matrix::identity(2);
      e += pauli_x() * Complex(dir[0], 0.0);
      e += pauli_y() * Complex(dir[1], 0.0);
      e += pauli_z() * Complex(dir[2], 0.0);
      povm.elements.push_back(e * Complex(0.25, 0.0));
    }
    return povm;
  }
  constexpr double kMaxCondition = 1e6;
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    Rng rng = derived_rng(seed, detail::kIcPovmStream + attempt);
    std::vector<Matrix> blocks;
    Matrix sum(d, d);
    for (int i = 0; i < d * d; ++i) {
      Vector g(d);
      for (int k = 0; k < d; ++k) g[k] = rng.complex_gaussian();
      blocks.push_back(outer(g, g));
      sum += blocks.back();
    }
    Matrix whiten;
    try {
      whiten = psd_inv_sqrt(sum, 1e-12 * lambda_max(sum));
    } catch (const SingularMError&) {
      continue;
    }
    Povm povm;
    povm.dim = d;
    for (const Matrix& b : blocks) povm.elements.push_back(hermitian_part(whiten * b * whiten));
    const Eigh gram = eigh(frame_gram(povm));
    if (gram.values.back() > 0.0 && gram.values.front() / gram.values.back() < kMaxCondition) {
      return povm;
    }
  }
  throw FrameSingularError("ic_povm: no invertible frame after max_retries attempts");
}

// Two projectors onto the +-1 eigenvectors of
// cos(theta) sigma_z + sin(theta) cos(phi) sigma_x + sin(theta) sin(phi) sigma_y.
inline Povm qubit_projective(double theta, double phi) {
  const double nx = std::sin(theta) * std::cos(phi);
  const double ny = std::sin(theta) * std::sin(phi);
  const double nz = std::cos(theta);
  Matrix bloch = pauli_x() * Complex(nx, 0.0);
  bloch += pauli_y() * Complex(ny, 0.0);
  bloch += pauli_z() * Complex(nz, 0.0);
  Povm povm;
  povm.dim = 2;
  povm.elements.push_back((Matrix::identity(2) + bloch) * Complex(0.5, 0.0));
  povm.elements.push_back((Matrix::identity(2) - bloch) * Complex(0.5, 0.0));
  return povm;
}

}  // namespace poptsim
