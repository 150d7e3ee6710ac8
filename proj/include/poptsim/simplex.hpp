#pragma once

// Dense two-phase revised simplex for standard-form programs
//   min c.x  s.t.  A x = b, x >= 0,
// sized for a handful of rows and up to a few tens of thousands of columns.
// The basis inverse is refactorized from scratch every iteration (m is tiny),
// pricing is Dantzig with smallest-index tie-breaks and a Bland fallback
// after an iteration threshold, so runs are deterministic.

#include <cmath>
#include <string>
#include <vector>

#include "poptsim/errors.hpp"

namespace poptsim {

struct SimplexSolution {
  enum class Status { kOptimal, kInfeasible, kUnbounded };
  Status status = Status::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
};

namespace detail {

// Invert the m x m matrix whose columns are the basis columns.
inline std::vector<double> invert_basis(int m, const std::vector<double>& basis_cols) {
  std::vector<double> a = basis_cols;       // row-major m x m
  std::vector<double> inv(m * m, 0.0);
  for (int i = 0; i < m; ++i) inv[i * m + i] = 1.0;
  for (int col = 0; col < m; ++col) {
    int pivot = col;
    double best = std::abs(a[col * m + col]);
    for (int r = col + 1; r < m; ++r) {
      const double cand = std::abs(a[r * m + col]);
      if (cand > best) {
        best = cand;
        pivot = r;
      }
    }
    if (best < 1e-12) throw Error("simplex: singular basis");
    if (pivot != col) {
      for (int j = 0; j < m; ++j) {
        std::swap(a[pivot * m + j], a[col * m + j]);
        std::swap(inv[pivot * m + j], inv[col * m + j]);
      }
    }
    const double diag = a[col * m + col];
    for (int j = 0; j < m; ++j) {
      a[col * m + j] /= diag;
      inv[col * m + j] /= diag;
    }
    for (int r = 0; r < m; ++r) {
      if (r == col) continue;
      const double f = a[r * m + col];
      if (f == 0.0) continue;
      for (int j = 0; j < m; ++j) {
        a[r * m + j] -= f * a[col * m + j];
        inv[r * m + j] -= f * inv[col * m + j];
      }
    }
  }
  return inv;
}

struct SimplexCore {
  int m;
  int n_total;  // real columns plus artificials
  int n_real;
  const std::vector<double>* cols;  // column-major, n_real columns of length m
  std::vector<double> rhs;
  std::vector<int> basis;

  void get_column(int j, std::vector<double>& out) const {
    out.assign(m, 0.0);
    if (j < n_real) {
      for (int i = 0; i < m; ++i) out[i] = (*cols)[static_cast<std::size_t>(j) * m + i];
    } else {
      out[j - n_real] = 1.0;
    }
  }

  // Runs the simplex loop for the given costs. Returns false on unbounded.
  bool iterate(const std::vector<double>& cost, bool allow_artificials) {
    std::vector<double> col(m), u(m), pi(m), xb(m), basis_cols(m * m);
    const int max_iters = 50000;
    const int bland_after = 20000;
    for (int iter = 0; iter < max_iters; ++iter) {
      for (int k = 0; k < m; ++k) {
        get_column(basis[k], col);
        for (int i = 0; i < m; ++i) basis_cols[i * m + k] = col[i];
      }
      const std::vector<double> binv = invert_basis(m, basis_cols);
      for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) s += binv[i * m + j] * rhs[j];
        xb[i] = s;
      }
      for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += cost[basis[k]] * binv[k * m + j];
        pi[j] = s;
      }

      const bool bland = iter >= bland_after;
      int entering = -1;
      double best_reduced = -1e-9;
      const int limit = allow_artificials ? n_total : n_real;
      for (int j = 0; j < limit; ++j) {
        bool basic = false;
        for (int k = 0; k < m; ++k)
          if (basis[k] == j) {
            basic = true;
            break;
          }
        if (basic) continue;
        get_column(j, col);
        double reduced = cost[j];
        for (int i = 0; i < m; ++i) reduced -= pi[i] * col[i];
        if (reduced < best_reduced) {
          entering = j;
          if (bland) break;
          best_reduced = reduced;
        }
      }
      if (entering < 0) return true;  // optimal

      get_column(entering, col);
      for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) s += binv[i * m + j] * col[j];
        u[i] = s;
      }
      int leaving = -1;
      double best_ratio = 0.0;
      for (int k = 0; k < m; ++k) {
        if (u[k] > 1e-11) {
          const double ratio = xb[k] / u[k];
          if (leaving < 0 || ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 && basis[k] < basis[leaving])) {
            leaving = k;
            best_ratio = ratio;
          }
        }
      }
      if (leaving < 0) return false;  // unbounded direction
      basis[leaving] = entering;
    }
    throw Error("simplex: iteration limit exceeded");
  }

  double objective_value(const std::vector<double>& cost) {
    std::vector<double> col(m), basis_cols(m * m), xb(m);
    for (int k = 0; k < m; ++k) {
      get_column(basis[k], col);
      for (int i = 0; i < m; ++i) basis_cols[i * m + k] = col[i];
    }
    const std::vector<double> binv = invert_basis(m, basis_cols);
    double obj = 0.0;
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int j = 0; j < m; ++j) s += binv[i * m + j] * rhs[j];
      xb[i] = s;
      obj += cost[basis[i]] * s;
    }
    basic_values = xb;
    return obj;
  }

  std::vector<double> basic_values;
};

}  // namespace detail

// a_cols is column-major: column j occupies a_cols[j*m .. j*m+m-1].
inline SimplexSolution simplex_min(int m, int n, const std::vector<double>& a_cols,
                                   std::vector<double> b, const std::vector<double>& cost) {
  if (static_cast<int>(a_cols.size()) != m * n || static_cast<int>(b.size()) != m ||
      static_cast<int>(cost.size()) != n) {
    throw DimensionError("simplex_min: inconsistent problem shape");
  }

  // Flip rows so the right-hand side is nonnegative; artificials then form a
  // feasible identity basis.
  std::vector<double> cols = a_cols;
  for (int i = 0; i < m; ++i) {
    if (b[i] < 0.0) {
      b[i] = -b[i];
      for (int j = 0; j < n; ++j) cols[static_cast<std::size_t>(j) * m + i] *= -1.0;
    }
  }

  detail::SimplexCore core;
  core.m = m;
  core.n_real = n;
  core.n_total = n + m;
  core.cols = &cols;
  core.rhs = b;
  core.basis.resize(m);
  for (int i = 0; i < m; ++i) core.basis[i] = n + i;

  // Phase 1: minimize the sum of artificials.
  std::vector<double> phase1_cost(n + m, 0.0);
  for (int i = 0; i < m; ++i) phase1_cost[n + i] = 1.0;
  if (!core.iterate(phase1_cost, true)) {
    throw Error("simplex: phase-1 reported an unbounded direction");
  }
  const double infeasibility = core.objective_value(phase1_cost);
  SimplexSolution out;
  if (infeasibility > 1e-7) {
    out.status = SimplexSolution::Status::kInfeasible;
    return out;
  }

  // Drive any remaining artificials out of the basis; a row whose real
  // entries are all zero under the current inverse is redundant, and its
  // artificial can safely stay at level zero with zero cost.
  std::vector<double> phase2_cost(n + m, 0.0);
  for (int j = 0; j < n; ++j) phase2_cost[j] = cost[j];

  if (!core.iterate(phase2_cost, false)) {
    out.status = SimplexSolution::Status::kUnbounded;
    return out;
  }
  out.objective = core.objective_value(phase2_cost);
  out.status = SimplexSolution::Status::kOptimal;
  out.x.assign(n, 0.0);
  for (int k = 0; k < m; ++k) {
    if (core.basis[k] < n) {
      out.x[core.basis[k]] = core.basic_values[k];
    } else if (core.basic_values[k] > 1e-7) {
      throw Error("simplex: artificial variable left positive after phase 2");
    }
  }
  // A x = b must hold in the real columns alone.
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += cols[static_cast<std::size_t>(j) * m + i] * out.x[j];
    if (std::abs(s - b[i]) > 1e-6) throw Error("simplex: solution fails the equality system");
  }
  return out;
}

}  // namespace poptsim
