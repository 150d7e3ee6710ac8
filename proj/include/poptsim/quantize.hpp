#pragma once

// The constructive heart of the library: turn a block-positive state W into
// a genuine quantum state sigma plus a relabeling f of Alice's POVMs such
// that tr((Q (x) R) W) = tr((f(Q) (x) R) sigma) for every measurement pair.
//
// Construction: W -> map via the Choi correspondence, split off M = map(1),
// take psi = (M^{1/2})^T (x) 1 |Phi> and relabel with
// f(Q) = wtilde(Q^T)^T. Bob's POVMs pass through untouched. When M is
// singular the epsilon-regularized decomposition is used; the simulated
// correlations then belong to the blended state (1-eps) W + eps 1/d^2, so
// the deviation from W's correlations vanishes linearly in eps.

#include <cmath>
#include <cstdint>
#include <string>

#include "poptsim/choi.hpp"
#include "poptsim/eigh.hpp"
#include "poptsim/errors.hpp"
#include "poptsim/matrix.hpp"
#include "poptsim/popt.hpp"
#include "poptsim/povm.hpp"
#include "poptsim/rng.hpp"

namespace poptsim {

struct QuantumSimulation {
  int d = 0;
  Matrix sigma;   // |psi><psi|, trace one when epsilon = 0
  Vector psi;
  UnitalDecomposition decomposition;
};

inline QuantumSimulation quantize(const PoptState& state, double epsilon = 0.0) {
  if (state.dim_a != state.dim_b) {
    throw DimensionError("quantize: equal local dimensions required");
  }
  if (state.evidence.min_product_value < -kPopTol) {
    throw NotPoptWitnessedError(
        "quantize: refusing input with witnessed negative product expectation " +
        std::to_string(state.evidence.min_product_value));
  }
  const int d = state.dim_a;

  QuantumSimulation sim;
  sim.d = d;
  sim.decomposition = unital_decompose(map_from_popt(state), epsilon);

  const Matrix sqrt_m = psd_sqrt(sim.decomposition.m);
  sim.psi = mat_vec(kron(sqrt_m.transpose(), Matrix::identity(d)), max_entangled(d));
  sim.sigma = outer(sim.psi, sim.psi);
  return sim;
}

// f: Q -> wtilde(Q^T)^T, applied elementwise. Positivity of each image
// follows from positivity of the unital part, completeness from unitality;
// a validation failure here means the decomposition is broken.
inline Povm transform_povm(const QuantumSimulation& sim, const Povm& p) {
  if (p.dim != sim.d) throw DimensionError("transform_povm: POVM dimension mismatch");
  Povm out;
  out.dim = p.dim;
  out.elements.reserve(p.elements.size());
  for (const Matrix& q : p.elements) {
    out.elements.push_back(hermitian_part(apply_map(sim.decomposition.wtilde, q.transpose()).transpose()));
  }
  const PovmReport report = validate_povm(out, 1e-8, 1e-8);
  if (!report.ok) {
    throw std::logic_error("transform_povm: output failed POVM validation (psd violation " +
                           std::to_string(report.worst_psd_violation) + ", completeness " +
                           std::to_string(report.completeness_residual) + ")");
  }
  return out;
}

// Max over `trials` random POVM pairs and all outcome pairs of
// |tr((Q (x) R) W) - tr((f(Q) (x) R) sigma)|.
inline double verify_simulation(const PoptState& state, const QuantumSimulation& sim, int trials,
                                std::uint64_t seed) {
  if (state.dim_a != sim.d || state.dim_b != sim.d) {
    throw DimensionError("verify_simulation: dimension mismatch");
  }
  const int d = sim.d;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng = derived_rng(seed, 2 * static_cast<std::uint64_t>(t));
    const int ka = 2 + static_cast<int>(rng.next_u64() % 3);
    const int kb = 2 + static_cast<int>(rng.next_u64() % 3);
    const Povm alice = random_povm_rng(d, ka, rng);
    const Povm bob = random_povm_rng(d, kb, rng);
    const Povm alice_t = transform_povm(sim, alice);
    for (int a = 0; a < ka; ++a)
      for (int b = 0; b < kb; ++b) {
        const double p_popt =
            product_expectation(state.w, d, d, alice.elements[a], bob.elements[b]).real();
        const double p_sim =
            product_expectation(sim.sigma, d, d, alice_t.elements[a], bob.elements[b]).real();
        worst = std::max(worst, std::abs(p_popt - p_sim));
      }
  }
  return worst;
}

}  // namespace poptsim
