#pragma once

// States that are positive on pure tensors (POPT / block-positive): the
// no-signaling preparations over local quantum measurements. A trace-one
// Hermitian W on the product space qualifies when <ab|W|ab> >= 0 for every
// product vector. Deciding that exactly is NP-hard, so positivity is tracked
// as evidence: a spectral certificate when W happens to be PSD, and the
// smallest value seen by a multi-restart alternating minimization otherwise.

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

// Absolute tolerance for pure-tensor expectations of a trace-one W.
inline constexpr double kPopTol = 1e-8;
inline constexpr double kTraceAtol = 1e-9;

// Evidence pass run by the family constructors.
inline constexpr int kEvidenceRestarts = 16;
inline constexpr int kEvidenceIters = 40;
inline constexpr std::uint64_t kEvidenceSeed = 0xB10C905ULL;

struct PositivityEvidence {
  double min_product_value = 0.0;  // smallest evaluated <ab|W|ab>
  int restarts = 0;                // see-saw restarts behind that value
  bool certified_psd = false;      // spectral certificate (sufficient, not necessary)
};

struct PoptState {
  int dim_a = 0;
  int dim_b = 0;
  Matrix w;
  PositivityEvidence evidence;

  int joint_dim() const { return dim_a * dim_b; }
};

struct ProductOverlap {
  double value = 0.0;
  Vector alpha;
  Vector beta;
};

enum class PoptClass { kQuantum, kPoptBeyondQuantum, kNotPoptEvidence, kInconclusive };

inline const char* to_string(PoptClass c) {
  switch (c) {
    case PoptClass::kQuantum:
      return "quantum";
    case PoptClass::kPoptBeyondQuantum:
      return "popt_beyond_quantum";
    case PoptClass::kNotPoptEvidence:
      return "not_popt";
    case PoptClass::kInconclusive:
      return "inconclusive";
  }
  return "?";
}

struct Classification {
  PoptClass cls = PoptClass::kInconclusive;
  double lambda_min = 0.0;
  ProductOverlap overlap;
  PositivityEvidence evidence;
};

namespace detail {

inline constexpr std::uint64_t kOverlapStream = 0x4f76724cULL;  // "OvrL"

inline void check_dims(int dim_a, int dim_b) {
  if (dim_a < 1 || dim_b < 1 || dim_a > kMaxLocalDim || dim_b > kMaxLocalDim) {
    throw DimensionError("local dimensions must lie in [1, 32]");
  }
}

// Smallest diagonal product expectation <ij|W|ij>; a cheap deterministic
// sample of pure tensors, enough to witness gross negativity.
inline ProductOverlap diagonal_probe(const Matrix& w, int dim_a, int dim_b) {
  ProductOverlap best;
  best.value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim_a; ++i)
    for (int j = 0; j < dim_b; ++j) {
      const double v = w(i * dim_b + j, i * dim_b + j).real();
      if (v < best.value) {
        best.value = v;
        best.alpha.assign(dim_a, Complex(0.0, 0.0));
        best.beta.assign(dim_b, Complex(0.0, 0.0));
        best.alpha[i] = 1.0;
        best.beta[j] = 1.0;
      }
    }
  return best;
}

}  // namespace detail

// Alternating minimization of <ab|W|ab> over unit product vectors: fix
// beta, take the bottom eigenvector of (1 (x) <beta|) W (1 (x) |beta>),
// then swap roles. Each half-step is an exact minimization, so the value is
// nonincreasing; the result is an upper bound on the true pure-tensor
// minimum, never a certificate. Restart r draws its starting vector from a
// substream derived from (seed, r), so nested restart budgets share their
// prefix and more restarts can only improve the bound.
inline ProductOverlap min_product_overlap(const Matrix& w, int dim_a, int dim_b, int restarts,
                                          int iters, std::uint64_t seed) {
  detail::check_dims(dim_a, dim_b);
  if (!w.square() || w.rows() != dim_a * dim_b) {
    throw DimensionError("min_product_overlap: operator size does not match dims");
  }
  if (w.hermiticity_error() > kDefaultHermitianAtol * std::max(1.0, w.max_abs())) {
    throw NotHermitianError("min_product_overlap: W must be Hermitian");
  }
  ProductOverlap best = detail::diagonal_probe(w, dim_a, dim_b);
  for (int r = 0; r < restarts; ++r) {
    Rng rng = derived_rng(seed, detail::kOverlapStream + static_cast<std::uint64_t>(r));
    Vector beta = random_unit_vector(dim_b, rng);
    Vector alpha;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < iters; ++it) {
      const Eigh ea = eigh(contract_bob(w, dim_a, dim_b, beta));
      alpha = eig_column(ea, dim_a - 1);
      const Eigh eb = eigh(contract_alice(w, dim_a, dim_b, alpha));
      beta = eig_column(eb, dim_b - 1);
      const double value = eb.values.back();
      if (value < best.value) {
        best.value = value;
        best.alpha = alpha;
        best.beta = beta;
      }
      if (std::abs(prev - value) < 1e-15) break;
      prev = value;
    }
  }
  return best;
}

// Structural wrap of a candidate W: shape, Hermiticity, unit trace, cheap
// diagonal evidence, spectral certificate. No sampling happens here; callers
// that need stronger evidence run refresh_evidence or classify.
inline PoptState popt_from_matrix(const Matrix& w, int dim_a, int dim_b) {
  detail::check_dims(dim_a, dim_b);
  if (!w.square() || w.rows() != dim_a * dim_b) {
    throw DimensionError("popt state: matrix size does not match dims");
  }
  if (w.hermiticity_error() > kDefaultHermitianAtol * std::max(1.0, w.max_abs())) {
    throw NotHermitianError("popt state: W must be Hermitian within 1e-12");
  }
  const double tr = w.trace().real();
  if (std::abs(tr - 1.0) > kTraceAtol) {
    throw BadTraceError("popt state: tr(W) = " + std::to_string(tr) + ", expected 1");
  }
  PoptState state;
  state.dim_a = dim_a;
  state.dim_b = dim_b;
  state.w = hermitian_part(w);
  const Eigh e = eigh(state.w);
  const double scale = std::max(std::abs(e.values.front()), std::abs(e.values.back()));
  state.evidence.certified_psd = e.values.back() >= -kDefaultPsdTol * std::max(1e-300, scale);
  state.evidence.min_product_value = detail::diagonal_probe(state.w, dim_a, dim_b).value;
  state.evidence.restarts = 0;
  return state;
}

inline void refresh_evidence(PoptState& state, int restarts = kEvidenceRestarts,
                             int iters = kEvidenceIters, std::uint64_t seed = kEvidenceSeed) {
  const ProductOverlap overlap =
      min_product_overlap(state.w, state.dim_a, state.dim_b, restarts, iters, seed);
  state.evidence.min_product_value = overlap.value;
  state.evidence.restarts = restarts;
}

// Every quantum state is positive on pure tensors; PSD plus unit trace gives
// the one rigorous certificate this module hands out.
inline PoptState from_quantum(const Matrix& rho, int dim_a, int dim_b) {
  detail::check_dims(dim_a, dim_b);
  if (!rho.square() || rho.rows() != dim_a * dim_b) {
    throw DimensionError("from_quantum: matrix size does not match dims");
  }
  if (!is_psd(rho)) throw NotPsdError("from_quantum: rho has a negative eigenvalue");
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > kTraceAtol) {
    throw BadTraceError("from_quantum: tr(rho) = " + std::to_string(tr) + ", expected 1");
  }
  PoptState state = popt_from_matrix(hermitian_part(rho), dim_a, dim_b);
  state.evidence.certified_psd = true;
  return state;
}

// SWAP/d: the canonical block-positive state with a negative eigenvalue.
// <ab|SWAP|ab> = |<a|b>|^2 >= 0, yet the spectrum contains -1/d.
inline PoptState choi_of_transpose(int d) {
  if (d < 2) throw DimensionError("choi_of_transpose: d must be >= 2");
  detail::check_dims(d, d);
  Matrix swap(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) swap(i * d + j, j * d + i) = 1.0 / static_cast<double>(d);
  PoptState state = popt_from_matrix(swap, d, d);
  refresh_evidence(state);
  return state;
}

// Partial transpose of a density matrix on the Bob factor. Always block
// positive: tr((Q (x) R) rho^{T_B}) = tr((Q (x) R^T) rho) >= 0.
inline PoptState partial_transpose_family(const Matrix& rho, int dim_a, int dim_b) {
  detail::check_dims(dim_a, dim_b);
  if (!rho.square() || rho.rows() != dim_a * dim_b) {
    throw DimensionError("partial_transpose_family: matrix size does not match dims");
  }
  if (!is_psd(rho)) throw NotPsdError("partial_transpose_family: rho must be PSD");
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > kTraceAtol) {
    throw BadTraceError("partial_transpose_family: tr(rho) must be 1");
  }
  PoptState state = popt_from_matrix(partial_transpose_bob(rho, dim_a, dim_b), dim_a, dim_b);
  refresh_evidence(state);
  return state;
}

// Sampled evidence below this restart budget is considered too weak to call
// a non-PSD candidate block positive.
inline constexpr int kMinClassifyRestarts = 8;

inline Classification classify(const Matrix& w, int dim_a, int dim_b, int restarts = 64,
                               int iters = 50, std::uint64_t seed = 17,
                               double pop_tol = kPopTol) {
  detail::check_dims(dim_a, dim_b);
  if (!w.square() || w.rows() != dim_a * dim_b) {
    throw DimensionError("classify: matrix size does not match dims");
  }
  if (w.hermiticity_error() > kDefaultHermitianAtol * std::max(1.0, w.max_abs())) {
    throw NotHermitianError("classify: W must be Hermitian");
  }
  if (std::abs(w.trace().real() - 1.0) > kTraceAtol) {
    throw BadTraceError("classify: tr(W) must be 1");
  }

  Classification result;
  const Eigh e = eigh(w);
  result.lambda_min = e.values.back();
  const double scale = std::max(std::abs(e.values.front()), std::abs(e.values.back()));
  const bool psd = result.lambda_min >= -kDefaultPsdTol * std::max(1e-300, scale);

  result.overlap = min_product_overlap(w, dim_a, dim_b, restarts, iters, seed);
  result.evidence.min_product_value = result.overlap.value;
  result.evidence.restarts = restarts;
  result.evidence.certified_psd = psd;

  if (psd) {
    result.cls = PoptClass::kQuantum;
  } else if (result.overlap.value < -pop_tol) {
    result.cls = PoptClass::kNotPoptEvidence;
  } else if (restarts >= kMinClassifyRestarts) {
    result.cls = PoptClass::kPoptBeyondQuantum;
  } else {
    result.cls = PoptClass::kInconclusive;
  }
  return result;
}

}  // namespace poptsim
