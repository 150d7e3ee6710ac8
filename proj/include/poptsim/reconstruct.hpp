#pragma once

// Reconstruction of a block-positive state from a black-box preparation: a
// function assigning probabilities to pairs of local POVM elements. With
// informationally complete frames on both sides the tabulated outcome
// probabilities determine a unique Hermitian W; the least-squares residual
// over an overcomplete (spanning, more than d^2 elements) tabulation doubles
// as a linearity / no-signaling diagnostic, since only genuinely linear
// preparations admit a consistent W.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "poptsim/errors.hpp"
#include "poptsim/lstsq.hpp"
#include "poptsim/matrix.hpp"
#include "poptsim/popt.hpp"
#include "poptsim/povm.hpp"
#include "poptsim/rng.hpp"

namespace poptsim {

inline constexpr double kOracleTol = 1e-9;
inline constexpr double kResidualTol = 1e-6;  // entrywise max residual
inline constexpr double kOracleNoSignalingTol = 1e-10;

struct PreparationOracle {
  int dim = 0;  // equal local dimensions
  std::function<double(const Matrix&, const Matrix&)> eval;
};

// The trace-formula oracle backed by a concrete state; the reference
// implementation of the preparation contract.
inline PreparationOracle popt_oracle(const PoptState& state) {
  if (state.dim_a != state.dim_b) {
    throw DimensionError("popt_oracle: equal local dimensions required");
  }
  PreparationOracle oracle;
  oracle.dim = state.dim_a;
  const PoptState copy = state;
  oracle.eval = [copy](const Matrix& q, const Matrix& r) {
    return product_expectation(copy.w, copy.dim_a, copy.dim_b, q, r).real();
  };
  return oracle;
}

// T[a][b] = oracle(E^A_a, E^B_b) over informationally complete frames.
inline std::vector<std::vector<double>> tabulate_omega(const PreparationOracle& oracle,
                                                       const Povm& ic_a, const Povm& ic_b) {
  if (ic_a.dim != oracle.dim || ic_b.dim != oracle.dim) {
    throw DimensionError("tabulate_omega: POVM dimension mismatch");
  }
  if (!is_informationally_complete(ic_a) || !is_informationally_complete(ic_b)) {
    throw FrameSingularError("tabulate_omega: both frames must be informationally complete");
  }
  std::vector<std::vector<double>> table(ic_a.outcomes(),
                                         std::vector<double>(ic_b.outcomes(), 0.0));
  for (int a = 0; a < ic_a.outcomes(); ++a)
    for (int b = 0; b < ic_b.outcomes(); ++b) {
      const double v = oracle.eval(ic_a.elements[a], ic_b.elements[b]);
      if (!(v >= -kOracleTol && v <= 1.0 + kOracleTol)) {
        throw Error("tabulate_omega: oracle returned " + std::to_string(v) +
                    ", outside [0, 1]");
      }
      table[a][b] = v;
    }
  return table;
}

struct OracleNoSignalingReport {
  bool ok = false;
  double worst = 0.0;
};

// Draws random measurement elements on one side and two competing POVMs on
// the other; the marginal sum must not care which competing POVM is summed
// over. Both directions are checked.
inline OracleNoSignalingReport verify_oracle_no_signaling(const PreparationOracle& oracle,
                                                          int trials, std::uint64_t seed,
                                                          double tol = kOracleNoSignalingTol) {
  const int d = oracle.dim;
  OracleNoSignalingReport report;
  constexpr std::uint64_t kStream = 0x4f724e73ULL;  // "OrNs"
  for (int t = 0; t < trials; ++t) {
    Rng rng = derived_rng(seed, kStream + static_cast<std::uint64_t>(t));
    const Povm probe = random_povm_rng(d, 2 + static_cast<int>(rng.next_u64() % 3), rng);
    const Povm first = random_povm_rng(d, 2 + static_cast<int>(rng.next_u64() % 3), rng);
    const Povm second = random_povm_rng(d, 2 + static_cast<int>(rng.next_u64() % 3), rng);
    for (const Matrix& q : probe.elements) {
      double m1 = 0.0, m2 = 0.0;
      for (const Matrix& r : first.elements) m1 += oracle.eval(q, r);
      for (const Matrix& r : second.elements) m2 += oracle.eval(q, r);
      report.worst = std::max(report.worst, std::abs(m1 - m2));
      double w1 = 0.0, w2 = 0.0;
      for (const Matrix& r : first.elements) w1 += oracle.eval(r, q);
      for (const Matrix& r : second.elements) w2 += oracle.eval(r, q);
      report.worst = std::max(report.worst, std::abs(w1 - w2));
    }
  }
  report.ok = report.worst <= tol;
  return report;
}

struct ReconstructionResult {
  PoptState state;
  double residual = 0.0;  // entrywise max over the tabulated equations
};

// Solve tr((E^A_a (x) E^B_b) W) = T[a][b] for Hermitian W by least squares
// over the product Hermitian basis. Square frames (exactly d^2 elements)
// make the system exactly determined; overcomplete spanning frames make it
// overdetermined, and a residual above kResidualTol then witnesses that the
// tabulated data is not of block-positive (linear) origin.
inline ReconstructionResult reconstruct_popt(const std::vector<std::vector<double>>& table,
                                             const Povm& ic_a, const Povm& ic_b) {
  const int da = ic_a.dim;
  const int db = ic_b.dim;
  const int ka = ic_a.outcomes();
  const int kb = ic_b.outcomes();
  if (static_cast<int>(table.size()) != ka) {
    throw DimensionError("reconstruct_popt: table rows must match Alice frame");
  }
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != kb) {
      throw DimensionError("reconstruct_popt: table cols must match Bob frame");
    }
  }
  if (!is_informationally_complete(ic_a) || !is_informationally_complete(ic_b)) {
    throw FrameSingularError("reconstruct_popt: both frames must be informationally complete");
  }

  const std::vector<Matrix> basis_a = hermitian_basis(da);
  const std::vector<Matrix> basis_b = hermitian_basis(db);
  const int pa = da * da;
  const int pb = db * db;

  // Local frame coefficients; a joint row factorizes as an outer product.
  std::vector<double> fa(static_cast<std::size_t>(ka) * pa);
  std::vector<double> fb(static_cast<std::size_t>(kb) * pb);
  for (int a = 0; a < ka; ++a)
    for (int p = 0; p < pa; ++p)
      fa[static_cast<std::size_t>(a) * pa + p] = (ic_a.elements[a] * basis_a[p]).trace().real();
  for (int b = 0; b < kb; ++b)
    for (int q = 0; q < pb; ++q)
      fb[static_cast<std::size_t>(b) * pb + q] = (ic_b.elements[b] * basis_b[q]).trace().real();

  const int nrows = ka * kb;
  const int ncols = pa * pb;
  std::vector<double> a_mat(static_cast<std::size_t>(nrows) * ncols);
  std::vector<double> rhs(nrows);
  for (int a = 0; a < ka; ++a)
    for (int b = 0; b < kb; ++b) {
      const int row = a * kb + b;
      rhs[row] = table[a][b];
      for (int p = 0; p < pa; ++p)
        for (int q = 0; q < pb; ++q)
          a_mat[static_cast<std::size_t>(row) * ncols + p * pb + q] =
              fa[static_cast<std::size_t>(a) * pa + p] * fb[static_cast<std::size_t>(b) * pb + q];
    }

  const LstsqResult solution = lstsq_solve(nrows, ncols, a_mat, rhs);
  if (solution.residual_inf > kResidualTol) {
    throw ResidualTooLargeError(
        "reconstruct_popt: residual " + std::to_string(solution.residual_inf) +
        " exceeds " + std::to_string(kResidualTol) +
        "; tabulated data is not consistent with any linear preparation");
  }

  Matrix w(da * db, da * db);
  for (int p = 0; p < pa; ++p)
    for (int q = 0; q < pb; ++q) {
      const double coeff = solution.x[static_cast<std::size_t>(p) * pb + q];
      if (coeff == 0.0) continue;
      w += kron(basis_a[p], basis_b[q]) * Complex(coeff, 0.0);
    }
  w = hermitian_part(w);

  const double tr = w.trace().real();
  if (std::abs(tr - 1.0) > 1e-6) {
    throw BadTraceError("reconstruct_popt: reconstructed trace " + std::to_string(tr) +
                        " too far from 1");
  }
  w *= Complex(1.0 / tr, 0.0);

  ReconstructionResult result{popt_from_matrix(w, da, db), solution.residual_inf};
  refresh_evidence(result.state);
  return result;
}

}  // namespace poptsim
