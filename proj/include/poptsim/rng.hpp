#pragma once

// Deterministic randomness. mt19937_64 is fully specified by the standard,
// and the gaussian transform is our own Box-Muller, so identical seeds give
// identical streams across compilers. Independent substreams are derived by
// splitmix64 mixing of (seed, stream).

#include <cmath>
#include <cstdint>
#include <random>

#include "poptsim/matrix.hpp"

namespace poptsim {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double kTwoPi = 6.28318530717958647692;
    const double angle = kTwoPi * u2;
    spare_ = r * std::sin(angle);
    have_spare_ = true;
    return r * std::cos(angle);
  }

  Complex complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return Complex(re, im);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x517cc1b727220a95ULL));
}

inline Rng derived_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(mix_seed(seed, stream));
}

inline Vector random_unit_vector(int d, Rng& rng) {
  Vector v(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) v[i] = rng.complex_gaussian();
    norm = vnorm(v);
  } while (norm < 1e-6);
  for (int i = 0; i < d; ++i) v[i] /= norm;
  return v;
}

inline Matrix random_gaussian_matrix(int rows, int cols, Rng& rng) {
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = rng.complex_gaussian();
  return g;
}

// Exactly Hermitian by construction.
inline Matrix random_hermitian(int d, Rng& rng) {
  return hermitian_part(random_gaussian_matrix(d, d, rng));
}

// G^dagger G, full rank with probability one.
inline Matrix random_psd(int d, Rng& rng) {
  const Matrix g = random_gaussian_matrix(d, d, rng);
  return g.dagger() * g;
}

inline Matrix random_density(int d, Rng& rng) {
  Matrix p = random_psd(d, rng);
  return p / p.trace();
}

inline Matrix random_pure_density(int d, Rng& rng) {
  const Vector v = random_unit_vector(d, rng);
  return outer(v, v);
}

}  // namespace poptsim
