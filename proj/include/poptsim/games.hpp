#pragma once

// The CHSH layer: correlation tables, the win functional, classical and
// no-signaling reference points, see-saw maximization over measurements for
// a fixed shared state, and a sampled-constraint LP upper bound over
// block-positive states at fixed measurements.
//
// CHSH: referee draws x, y uniformly; the players win iff a + b = x*y mod 2.
// Classical strategies reach 3/4, quantum states 1/2 + 1/(2 sqrt(2)), the
// PR box 1.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "poptsim/eigh.hpp"
#include "poptsim/errors.hpp"
#include "poptsim/matrix.hpp"
#include "poptsim/popt.hpp"
#include "poptsim/povm.hpp"
#include "poptsim/rng.hpp"
#include "poptsim/simplex.hpp"

namespace poptsim {

inline constexpr double kTableNegTol = 1e-12;
inline constexpr double kTableSumTol = 1e-9;
inline constexpr double kNoSignalingTol = 1e-10;
// Entries below this witness a non-block-positive state.
inline constexpr double kEntryWitnessTol = 1e-10;

struct CorrelationTable {
  int nx = 0, ny = 0, na = 0, nb = 0;
  std::vector<double> p;  // indexed ((x * ny + y) * na + a) * nb + b

  CorrelationTable() = default;
  CorrelationTable(int nx_, int ny_, int na_, int nb_)
      : nx(nx_), ny(ny_), na(na_), nb(nb_),
        p(static_cast<std::size_t>(nx_) * ny_ * na_ * nb_, 0.0) {
    if (nx_ < 1 || ny_ < 1 || na_ < 1 || nb_ < 1) {
      throw DimensionError("correlation table: all shape entries must be positive");
    }
  }

  double& at(int x, int y, int a, int b) {
    return p[((static_cast<std::size_t>(x) * ny + y) * na + a) * nb + b];
  }
  double at(int x, int y, int a, int b) const {
    return p[((static_cast<std::size_t>(x) * ny + y) * na + a) * nb + b];
  }
};

struct TableReport {
  bool ok = false;
  double worst_negative = 0.0;   // most negative entry (0 when none)
  double worst_sum_error = 0.0;  // max |sum_ab p - 1| over settings
};

inline TableReport validate_table(const CorrelationTable& t, double neg_tol = kTableNegTol,
                                  double sum_tol = kTableSumTol) {
  TableReport report;
  double min_entry = 0.0;
  for (double v : t.p) min_entry = std::min(min_entry, v);
  report.worst_negative = -min_entry;
  for (int x = 0; x < t.nx; ++x)
    for (int y = 0; y < t.ny; ++y) {
      double sum = 0.0;
      for (int a = 0; a < t.na; ++a)
        for (int b = 0; b < t.nb; ++b) sum += t.at(x, y, a, b);
      report.worst_sum_error = std::max(report.worst_sum_error, std::abs(sum - 1.0));
    }
  report.ok = report.worst_negative <= neg_tol && report.worst_sum_error <= sum_tol;
  return report;
}

// p(a, b | x, y) = tr((Q_a (x) R_b) W). POVMs with fewer outcomes than the
// table width are padded with zero-probability outcomes. An entry below
// -kEntryWitnessTol is a witness that W is not block positive.
inline CorrelationTable correlations_from_popt(const PoptState& state,
                                               const std::vector<Povm>& alice,
                                               const std::vector<Povm>& bob) {
  if (alice.empty() || bob.empty()) throw DimensionError("correlations: need settings");
  int na = 0, nb = 0;
  for (const Povm& p : alice) {
    if (p.dim != state.dim_a) throw DimensionError("correlations: Alice POVM dimension");
    na = std::max(na, p.outcomes());
  }
  for (const Povm& p : bob) {
    if (p.dim != state.dim_b) throw DimensionError("correlations: Bob POVM dimension");
    nb = std::max(nb, p.outcomes());
  }
  CorrelationTable t(static_cast<int>(alice.size()), static_cast<int>(bob.size()), na, nb);
  for (int x = 0; x < t.nx; ++x)
    for (int y = 0; y < t.ny; ++y)
      for (int a = 0; a < alice[x].outcomes(); ++a)
        for (int b = 0; b < bob[y].outcomes(); ++b) {
          double v = product_expectation(state.w, state.dim_a, state.dim_b,
                                         alice[x].elements[a], bob[y].elements[b])
                         .real();
          if (v < -kEntryWitnessTol) {
            throw NotPoptWitnessedError(
                "correlations: negative probability " + std::to_string(v) + " at (x=" +
                std::to_string(x) + ", y=" + std::to_string(y) + ", a=" + std::to_string(a) +
                ", b=" + std::to_string(b) + ")");
          }
          if (v < 0.0) v = 0.0;  // roundoff-scale negativity
          t.at(x, y, a, b) = v;
        }
  return t;
}

inline double chsh_value(const CorrelationTable& t) {
  if (t.nx != 2 || t.ny != 2 || t.na != 2 || t.nb != 2) {
    throw DimensionError("chsh_value: table must be 2x2x2x2");
  }
  double s = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if (((a + b) & 1) == (x & y)) s += t.at(x, y, a, b);
  return 0.25 * s;
}

struct DeterministicStrategy {
  int a0 = 0, a1 = 0, b0 = 0, b1 = 0;

  int answer_a(int x) const { return x == 0 ? a0 : a1; }
  int answer_b(int y) const { return y == 0 ? b0 : b1; }
};

inline CorrelationTable deterministic_table(const DeterministicStrategy& s) {
  CorrelationTable t(2, 2, 2, 2);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) t.at(x, y, s.answer_a(x), s.answer_b(y)) = 1.0;
  return t;
}

struct ClassicalChshResult {
  double value = 0.0;
  std::vector<DeterministicStrategy> maximizers;
};

// Exhaustive maximum over the 16 deterministic strategy pairs. The optimum
// 3/4 is exact in binary floating point.
inline ClassicalChshResult classical_chsh_max() {
  ClassicalChshResult result;
  for (int a0 = 0; a0 < 2; ++a0)
    for (int a1 = 0; a1 < 2; ++a1)
      for (int b0 = 0; b0 < 2; ++b0)
        for (int b1 = 0; b1 < 2; ++b1) {
          const DeterministicStrategy s{a0, a1, b0, b1};
          int wins = 0;
          for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
              if (((s.answer_a(x) + s.answer_b(y)) & 1) == (x & y)) ++wins;
          const double value = 0.25 * wins;
          if (value > result.value) {
            result.value = value;
            result.maximizers.clear();
          }
          if (value == result.value) result.maximizers.push_back(s);
        }
  return result;
}

struct NoSignalingReport {
  bool ok = false;
  double worst = 0.0;
};

// Alice's marginal must not depend on y, and Bob's not on x.
inline NoSignalingReport check_no_signaling(const CorrelationTable& t,
                                            double tol = kNoSignalingTol) {
  NoSignalingReport report;
  for (int x = 0; x < t.nx; ++x)
    for (int a = 0; a < t.na; ++a) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (int y = 0; y < t.ny; ++y) {
        double m = 0.0;
        for (int b = 0; b < t.nb; ++b) m += t.at(x, y, a, b);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
      }
      report.worst = std::max(report.worst, hi - lo);
    }
  for (int y = 0; y < t.ny; ++y)
    for (int b = 0; b < t.nb; ++b) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (int x = 0; x < t.nx; ++x) {
        double m = 0.0;
        for (int a = 0; a < t.na; ++a) m += t.at(x, y, a, b);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
      }
      report.worst = std::max(report.worst, hi - lo);
    }
  report.ok = report.worst <= tol;
  return report;
}

// p(a, b | x, y) = 1/2 when a + b = x*y mod 2, else 0: wins with certainty.
inline CorrelationTable pr_box() {
  CorrelationTable t(2, 2, 2, 2);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if (((a + b) & 1) == (x & y)) t.at(x, y, a, b) = 0.5;
  return t;
}

inline double chsh_of_state(const Matrix& sigma, int d, const std::array<Povm, 2>& alice,
                            const std::array<Povm, 2>& bob) {
  double s = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if (((a + b) & 1) == (x & y))
            s += product_expectation(sigma, d, d, alice[x].elements[a], bob[y].elements[b])
                     .real();
  return 0.25 * s;
}

struct SeesawResult {
  double value = 0.0;
  std::array<Povm, 2> alice;
  std::array<Povm, 2> bob;
  std::vector<double> trace;  // win probability after each full sweep
};

namespace detail {

inline constexpr std::uint64_t kSeesawStream = 0x53656573ULL;  // "Sees"

// Projector onto the strictly positive eigenspace.
inline Matrix positive_projector(const Matrix& h) {
  const Eigh e = eigh(h);
  Matrix p(h.rows(), h.cols());
  for (std::size_t k = 0; k < e.values.size(); ++k) {
    if (e.values[k] > 0.0) {
      const Vector v = eig_column(e, static_cast<int>(k));
      p += outer(v, v);
    }
  }
  return hermitian_part(p);
}

inline Povm two_outcome_from_projector(int d, const Matrix& proj) {
  Povm povm;
  povm.dim = d;
  povm.elements.push_back(proj);
  povm.elements.push_back(Matrix::identity(d) - proj);
  return povm;
}

inline Povm random_two_outcome(int d, Rng& rng) {
  return two_outcome_from_projector(d, positive_projector(random_hermitian(d, rng)));
}

}  // namespace detail

// One see-saw run. Each half-sweep replaces one party's two settings with
// the exact maximizers given the other party, i.e. the projectors onto the
// positive eigenspaces of the conditional operators, so the win probability
// never decreases.
inline SeesawResult seesaw_once(const Matrix& sigma, int d, int iters, Rng& rng) {
  SeesawResult r;
  r.alice = {detail::random_two_outcome(d, rng), detail::random_two_outcome(d, rng)};
  r.bob = {detail::random_two_outcome(d, rng), detail::random_two_outcome(d, rng)};
  double prev = -1.0;
  for (int it = 0; it < iters; ++it) {
    for (int x = 0; x < 2; ++x) {
      // T^x_a = (1/4) sum_y tr_B((1 (x) R^y_{a xor x*y}) sigma)
      Matrix t0(d, d), t1(d, d);
      for (int y = 0; y < 2; ++y) {
        const int xy = x & y;
        t0 += conditional_alice(sigma, d, d, r.bob[y].elements[xy]);
        t1 += conditional_alice(sigma, d, d, r.bob[y].elements[1 - xy]);
      }
      r.alice[x] = detail::two_outcome_from_projector(
          d, detail::positive_projector(hermitian_part(t0 - t1) * Complex(0.25, 0.0)));
    }
    for (int y = 0; y < 2; ++y) {
      Matrix t0(d, d), t1(d, d);
      for (int x = 0; x < 2; ++x) {
        const int xy = x & y;
        t0 += conditional_bob(sigma, d, d, r.alice[x].elements[xy]);
        t1 += conditional_bob(sigma, d, d, r.alice[x].elements[1 - xy]);
      }
      r.bob[y] = detail::two_outcome_from_projector(
          d, detail::positive_projector(hermitian_part(t0 - t1) * Complex(0.25, 0.0)));
    }
    r.value = chsh_of_state(sigma, d, r.alice, r.bob);
    r.trace.push_back(r.value);
    if (r.value - prev < 1e-14) break;
    prev = r.value;
  }
  return r;
}

inline SeesawResult seesaw_max_chsh(const Matrix& sigma, int d, int restarts = 64,
                                    int iters = 50, std::uint64_t seed = 42) {
  if (!sigma.square() || sigma.rows() != d * d) {
    throw DimensionError("seesaw_max_chsh: sigma must be d^2 x d^2");
  }
  if (!is_psd(sigma)) throw NotPsdError("seesaw_max_chsh: sigma must be PSD");
  if (std::abs(sigma.trace().real() - 1.0) > 1e-8) {
    throw BadTraceError("seesaw_max_chsh: tr(sigma) must be 1");
  }
  SeesawResult best;
  best.value = -1.0;
  for (int r = 0; r < restarts; ++r) {
    Rng rng = derived_rng(seed, detail::kSeesawStream + static_cast<std::uint64_t>(r));
    SeesawResult cand = seesaw_once(sigma, d, iters, rng);
    if (cand.value > best.value) best = std::move(cand);
  }
  return best;
}

// Measurement settings attaining the quantum optimum on |Phi>:
// Alice sigma_z / sigma_x, Bob (sigma_z +- sigma_x)/sqrt(2).
inline std::array<Povm, 2> tsirelson_settings_alice() {
  constexpr double kPi = 3.14159265358979323846;
  return {qubit_projective(0.0, 0.0), qubit_projective(kPi / 2.0, 0.0)};
}

inline std::array<Povm, 2> tsirelson_settings_bob() {
  constexpr double kPi = 3.14159265358979323846;
  return {qubit_projective(kPi / 4.0, 0.0), qubit_projective(-kPi / 4.0, 0.0)};
}

// (1/4) sum_{x,y} sum_{a+b=xy} Q^x_a (x) R^y_b
inline Matrix chsh_win_operator(const std::array<Povm, 2>& alice,
                                const std::array<Povm, 2>& bob) {
  const int d2 = alice[0].dim * bob[0].dim;
  Matrix c(d2, d2);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if (((a + b) & 1) == (x & y))
            c += kron(alice[x].elements[a], bob[y].elements[b]);
  return hermitian_part(c * Complex(0.25, 0.0));
}

// Upper bound on the CHSH value over block-positive states at the given
// fixed qubit measurements, relaxed to n sampled pure-tensor constraints
// <a_i b_i | W | a_i b_i> >= 0 plus tr(W) = 1. The trace is eliminated over
// an orthonormal Hermitian basis (15 free variables) and the resulting LP is
// solved through its dual in standard form. Feasibility of |Phi><Phi| makes
// the result at least the quantum optimum; more constraints shrink the
// feasible set, so the bound is weakly decreasing in n under nested seeds.
inline double popt_chsh_lp_bound(const std::array<Povm, 2>& alice,
                                 const std::array<Povm, 2>& bob, int n_constraints,
                                 std::uint64_t seed) {
  if (alice[0].dim != 2 || alice[1].dim != 2 || bob[0].dim != 2 || bob[1].dim != 2) {
    throw DimensionError("popt_chsh_lp_bound: qubit measurements required");
  }
  if (n_constraints < 1) throw DimensionError("popt_chsh_lp_bound: need constraints");

  const std::vector<Matrix> basis = hermitian_basis(4);
  const Matrix c_op = chsh_win_operator(alice, bob);
  const int m = 15;

  std::vector<double> objective(m);
  for (int k = 0; k < m; ++k) objective[k] = (c_op * basis[k + 1]).trace().real();
  const double offset = c_op.trace().real() / 4.0;

  // Column i of the dual system is the constraint row <v_i|B_k|v_i>.
  std::vector<double> cols(static_cast<std::size_t>(m) * n_constraints);
  constexpr std::uint64_t kLpStream = 0x4c704264ULL;  // "LpBd"
  for (int i = 0; i < n_constraints; ++i) {
    Rng rng = derived_rng(seed, kLpStream + static_cast<std::uint64_t>(i));
    const Vector va = random_unit_vector(2, rng);
    const Vector vb = random_unit_vector(2, rng);
    const Vector v = kron(va, vb);
    for (int k = 0; k < m; ++k) {
      Complex s = 0.0;
      for (int r = 0; r < 4; ++r)
        for (int cidx = 0; cidx < 4; ++cidx) s += std::conj(v[r]) * basis[k + 1](r, cidx) * v[cidx];
      cols[static_cast<std::size_t>(i) * m + k] = s.real();
    }
  }

  // max c.w s.t. G w >= -1/4 dualizes to min (1/4) sum z, G^T z = -c, z >= 0.
  std::vector<double> rhs(m);
  for (int k = 0; k < m; ++k) rhs[k] = -objective[k];
  std::vector<double> dual_cost(n_constraints, 0.25);

  const SimplexSolution sol = simplex_min(m, n_constraints, cols, rhs, dual_cost);
  if (sol.status == SimplexSolution::Status::kInfeasible) {
    throw UnboundedError(
        "popt_chsh_lp_bound: LP unbounded with " + std::to_string(n_constraints) +
        " sampled constraints; increase n_constraints");
  }
  if (sol.status != SimplexSolution::Status::kOptimal) {
    throw Error("popt_chsh_lp_bound: unexpected solver status");
  }
  return offset + sol.objective;
}

}  // namespace poptsim
