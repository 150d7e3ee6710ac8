#pragma once

// JSON file formats. Every matrix is a nested array of [re, im] pairs in row
// major order; files carry a "kind" tag from {popt, density, povm_list,
// table, simulation}. Loading checks structural invariants (shape, finite
// entries, Hermiticity, traces, POVM completeness) and maps failures to
// ParseError or InvariantViolation; sampled properties such as pure-tensor
// positivity are left to the classification tools. Writes go through a
// temporary file plus rename.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "poptsim/choi.hpp"
#include "poptsim/errors.hpp"
#include "poptsim/games.hpp"
#include "poptsim/matrix.hpp"
#include "poptsim/popt.hpp"
#include "poptsim/povm.hpp"
#include "poptsim/quantize.hpp"

namespace poptsim {

using Json = nlohmann::json;

namespace detail {

inline double finite_number(const Json& j, const char* what) {
  if (!j.is_number()) throw ParseError(std::string(what) + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(std::string(what) + ": non-finite number");
  return v;
}

}  // namespace detail

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) {
      row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& j, const char* what = "matrix") {
  if (!j.is_array() || j.empty()) throw ParseError(std::string(what) + ": expected rows");
  const int rows = static_cast<int>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw ParseError(std::string(what) + ": expected cols");
  const int cols = static_cast<int>(j[0].size());
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols) {
      throw ParseError(std::string(what) + ": ragged rows");
    }
    for (int c = 0; c < cols; ++c) {
      const Json& entry = j[i][c];
      if (!entry.is_array() || entry.size() != 2) {
        throw ParseError(std::string(what) + ": entries must be [re, im] pairs");
      }
      m(i, c) = Complex(detail::finite_number(entry[0], what),
                        detail::finite_number(entry[1], what));
    }
  }
  return m;
}

inline Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (const Complex& z : v) out.push_back(Json::array({z.real(), z.imag()}));
  return out;
}

inline Vector vector_from_json(const Json& j, const char* what = "vector") {
  if (!j.is_array() || j.empty()) throw ParseError(std::string(what) + ": expected entries");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& entry = j[i];
    if (!entry.is_array() || entry.size() != 2) {
      throw ParseError(std::string(what) + ": entries must be [re, im] pairs");
    }
    v[i] = Complex(detail::finite_number(entry[0], what), detail::finite_number(entry[1], what));
  }
  return v;
}

inline Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw ParseError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
}

inline void save_json_atomic(const std::string& path, const Json& j) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out.good()) throw Error("cannot write " + tmp);
    out << j.dump(2) << "\n";
    if (!out.good()) throw Error("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw Error("rename failed for " + path);
  }
}

inline std::string kind_of(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ParseError("file has no \"kind\" tag");
  }
  return j.at("kind").get<std::string>();
}

namespace detail {

inline void expect_kind(const Json& j, const std::string& kind) {
  const std::string k = kind_of(j);
  if (k != kind) throw ParseError("expected kind \"" + kind + "\", found \"" + k + "\"");
}

inline std::pair<int, int> dims_from_json(const Json& j) {
  if (!j.contains("dims") || !j.at("dims").is_array() || j.at("dims").size() != 2) {
    throw ParseError("expected \"dims\": [dim_a, dim_b]");
  }
  const int da = j.at("dims")[0].get<int>();
  const int db = j.at("dims")[1].get<int>();
  if (da < 1 || db < 1 || da > kMaxLocalDim || db > kMaxLocalDim) {
    throw InvariantViolation("dims must lie in [1, 32]");
  }
  return {da, db};
}

}  // namespace detail

// ---- popt ----

inline Json popt_to_json(const PoptState& s) {
  Json j;
  j["kind"] = "popt";
  j["dims"] = Json::array({s.dim_a, s.dim_b});
  j["matrix"] = matrix_to_json(s.w);
  j["positivity_evidence"] = {{"min_product_value", s.evidence.min_product_value},
                              {"restarts", s.evidence.restarts},
                              {"certified_psd", s.evidence.certified_psd}};
  return j;
}

inline PoptState popt_from_json(const Json& j) {
  detail::expect_kind(j, "popt");
  const auto [da, db] = detail::dims_from_json(j);
  if (!j.contains("matrix")) throw ParseError("popt file: missing \"matrix\"");
  const Matrix w = matrix_from_json(j.at("matrix"));
  PoptState state;
  try {
    state = popt_from_matrix(w, da, db);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw InvariantViolation(e.what());
  }
  if (j.contains("positivity_evidence")) {
    const Json& ev = j.at("positivity_evidence");
    if (ev.contains("min_product_value")) {
      state.evidence.min_product_value =
          detail::finite_number(ev.at("min_product_value"), "positivity_evidence");
    }
    if (ev.contains("restarts")) state.evidence.restarts = ev.at("restarts").get<int>();
    // certified_psd is recomputed from the spectrum, never trusted from disk
  }
  return state;
}

// ---- density ----

inline Json density_to_json(const Matrix& rho, int dim_a, int dim_b) {
  Json j;
  j["kind"] = "density";
  j["dims"] = Json::array({dim_a, dim_b});
  j["matrix"] = matrix_to_json(rho);
  return j;
}

struct DensityFile {
  int dim_a = 0;
  int dim_b = 0;
  Matrix rho;
};

inline DensityFile density_from_json(const Json& j) {
  detail::expect_kind(j, "density");
  const auto [da, db] = detail::dims_from_json(j);
  if (!j.contains("matrix")) throw ParseError("density file: missing \"matrix\"");
  const Matrix rho = matrix_from_json(j.at("matrix"));
  if (!rho.square() || rho.rows() != da * db) {
    throw InvariantViolation("density file: matrix size does not match dims");
  }
  if (rho.hermiticity_error() > kDefaultHermitianAtol * std::max(1.0, rho.max_abs())) {
    throw InvariantViolation("density file: matrix is not Hermitian");
  }
  if (!is_psd(rho)) throw InvariantViolation("density file: matrix is not PSD");
  if (std::abs(rho.trace().real() - 1.0) > kTraceAtol) {
    throw InvariantViolation("density file: trace is " +
                             std::to_string(rho.trace().real()) + ", expected 1");
  }
  return {da, db, rho};
}

// ---- povm_list ----

inline Json povm_list_to_json(const std::vector<Povm>& povms) {
  Json j;
  j["kind"] = "povm_list";
  j["dim"] = povms.empty() ? 0 : povms[0].dim;
  Json list = Json::array();
  for (const Povm& p : povms) {
    Json elems = Json::array();
    for (const Matrix& e : p.elements) elems.push_back(matrix_to_json(e));
    list.push_back(std::move(elems));
  }
  j["povms"] = std::move(list);
  return j;
}

inline std::vector<Povm> povm_list_from_json(const Json& j) {
  detail::expect_kind(j, "povm_list");
  if (!j.contains("dim") || !j.contains("povms") || !j.at("povms").is_array()) {
    throw ParseError("povm_list file: missing \"dim\" or \"povms\"");
  }
  const int dim = j.at("dim").get<int>();
  if (dim < 1 || dim > kMaxLocalDim) throw InvariantViolation("povm_list: dim out of range");
  std::vector<Povm> povms;
  for (const Json& entry : j.at("povms")) {
    if (!entry.is_array() || entry.empty()) {
      throw ParseError("povm_list file: each POVM must be a nonempty array");
    }
    Povm p;
    p.dim = dim;
    for (const Json& e : entry) p.elements.push_back(matrix_from_json(e, "povm element"));
    const PovmReport report = validate_povm(p);
    if (!report.ok) {
      throw InvariantViolation("povm_list: POVM failed validation (psd violation " +
                               std::to_string(report.worst_psd_violation) + ", completeness " +
                               std::to_string(report.completeness_residual) + ")");
    }
    povms.push_back(std::move(p));
  }
  if (povms.empty()) throw InvariantViolation("povm_list: no POVMs");
  return povms;
}

// ---- table ----

inline Json table_to_json(const CorrelationTable& t) {
  Json j;
  j["kind"] = "table";
  j["shape"] = Json::array({t.nx, t.ny, t.na, t.nb});
  Json px = Json::array();
  for (int x = 0; x < t.nx; ++x) {
    Json py = Json::array();
    for (int y = 0; y < t.ny; ++y) {
      Json pa = Json::array();
      for (int a = 0; a < t.na; ++a) {
        Json pb = Json::array();
        for (int b = 0; b < t.nb; ++b) pb.push_back(t.at(x, y, a, b));
        pa.push_back(std::move(pb));
      }
      py.push_back(std::move(pa));
    }
    px.push_back(std::move(py));
  }
  j["p"] = std::move(px);
  return j;
}

inline CorrelationTable table_from_json(const Json& j) {
  detail::expect_kind(j, "table");
  if (!j.contains("shape") || !j.at("shape").is_array() || j.at("shape").size() != 4) {
    throw ParseError("table file: expected \"shape\": [nx, ny, na, nb]");
  }
  const int nx = j.at("shape")[0].get<int>();
  const int ny = j.at("shape")[1].get<int>();
  const int na = j.at("shape")[2].get<int>();
  const int nb = j.at("shape")[3].get<int>();
  if (nx < 1 || ny < 1 || na < 1 || nb < 1) throw InvariantViolation("table: bad shape");
  if (!j.contains("p")) throw ParseError("table file: missing \"p\"");
  CorrelationTable t(nx, ny, na, nb);
  const Json& px = j.at("p");
  if (!px.is_array() || static_cast<int>(px.size()) != nx) throw ParseError("table: bad p[x]");
  for (int x = 0; x < nx; ++x) {
    if (!px[x].is_array() || static_cast<int>(px[x].size()) != ny) {
      throw ParseError("table: bad p[x][y]");
    }
    for (int y = 0; y < ny; ++y) {
      const Json& pa = px[x][y];
      if (!pa.is_array() || static_cast<int>(pa.size()) != na) throw ParseError("table: bad p rows");
      for (int a = 0; a < na; ++a) {
        if (!pa[a].is_array() || static_cast<int>(pa[a].size()) != nb) {
          throw ParseError("table: bad p cols");
        }
        for (int b = 0; b < nb; ++b) t.at(x, y, a, b) = detail::finite_number(pa[a][b], "table");
      }
    }
  }
  const TableReport report = validate_table(t);
  if (!report.ok) {
    throw InvariantViolation("table: failed validation (negative " +
                             std::to_string(report.worst_negative) + ", sum error " +
                             std::to_string(report.worst_sum_error) + ")");
  }
  return t;
}

// ---- simulation ----

inline Json simulation_to_json(const QuantumSimulation& sim) {
  Json j;
  j["kind"] = "simulation";
  j["d"] = sim.d;
  j["epsilon"] = sim.decomposition.epsilon;
  j["psi"] = vector_to_json(sim.psi);
  j["sigma"] = matrix_to_json(sim.sigma);
  j["M"] = matrix_to_json(sim.decomposition.m);
  Json units = Json::array();
  for (const Matrix& u : sim.decomposition.wtilde.units) units.push_back(matrix_to_json(u));
  j["wtilde"] = std::move(units);
  return j;
}

inline QuantumSimulation simulation_from_json(const Json& j) {
  detail::expect_kind(j, "simulation");
  if (!j.contains("d") || !j.contains("epsilon") || !j.contains("psi") ||
      !j.contains("sigma") || !j.contains("M") || !j.contains("wtilde")) {
    throw ParseError("simulation file: missing fields");
  }
  QuantumSimulation sim;
  sim.d = j.at("d").get<int>();
  if (sim.d < 1 || sim.d > kMaxLocalDim) throw InvariantViolation("simulation: d out of range");
  sim.decomposition.epsilon = detail::finite_number(j.at("epsilon"), "epsilon");
  if (sim.decomposition.epsilon < 0.0) throw InvariantViolation("simulation: epsilon < 0");
  sim.psi = vector_from_json(j.at("psi"), "psi");
  sim.sigma = matrix_from_json(j.at("sigma"), "sigma");
  sim.decomposition.m = matrix_from_json(j.at("M"), "M");
  const Json& units = j.at("wtilde");
  if (!units.is_array() || static_cast<int>(units.size()) != sim.d * sim.d) {
    throw ParseError("simulation file: wtilde must hold d^2 matrix-unit images");
  }
  sim.decomposition.wtilde.din = sim.d;
  sim.decomposition.wtilde.dout = sim.d;
  for (const Json& u : units) {
    sim.decomposition.wtilde.units.push_back(matrix_from_json(u, "wtilde unit"));
  }

  const int d2 = sim.d * sim.d;
  if (static_cast<int>(sim.psi.size()) != d2 || sim.sigma.rows() != d2 || !sim.sigma.square() ||
      sim.decomposition.m.rows() != sim.d || !sim.decomposition.m.square()) {
    throw InvariantViolation("simulation: inconsistent shapes");
  }
  if (max_abs_diff(sim.sigma, outer(sim.psi, sim.psi)) > 1e-10) {
    throw InvariantViolation("simulation: sigma is not |psi><psi|");
  }
  if (std::abs(sim.sigma.trace().real() - 1.0) > 1e-8) {
    throw InvariantViolation("simulation: tr(sigma) must be 1");
  }
  if (hermiticity_preservation_error(sim.decomposition.wtilde) > 1e-10) {
    throw InvariantViolation("simulation: wtilde does not preserve Hermiticity");
  }
  const double unitality = max_abs_diff(
      apply_map(sim.decomposition.wtilde, Matrix::identity(sim.d)), Matrix::identity(sim.d));
  if (unitality > kUnitalityTol) {
    throw InvariantViolation("simulation: wtilde is not unital (" + std::to_string(unitality) +
                             ")");
  }
  return sim;
}

inline void save_popt(const std::string& path, const PoptState& s) {
  save_json_atomic(path, popt_to_json(s));
}
inline void save_density(const std::string& path, const Matrix& rho, int da, int db) {
  save_json_atomic(path, density_to_json(rho, da, db));
}
inline void save_table(const std::string& path, const CorrelationTable& t) {
  save_json_atomic(path, table_to_json(t));
}
inline void save_povm_list(const std::string& path, const std::vector<Povm>& povms) {
  save_json_atomic(path, povm_list_to_json(povms));
}
inline void save_simulation(const std::string& path, const QuantumSimulation& sim) {
  save_json_atomic(path, simulation_to_json(sim));
}

}  // namespace poptsim
