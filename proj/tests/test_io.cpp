#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "poptsim/io.hpp"
#include "poptsim/quantize.hpp"

namespace poptsim {
namespace {

namespace fs = std::filesystem;

std::string temp_path(const std::string& name) {
  return (fs::path(::testing::TempDir()) / name).string();
}

TEST(Io, PoptRoundTripIsLossless) {
  const PoptState w = choi_of_transpose(3);
  const std::string path = temp_path("swap3.json");
  save_popt(path, w);
  const PoptState back = popt_from_json(load_json(path));
  EXPECT_EQ(back.dim_a, 3);
  EXPECT_EQ(back.dim_b, 3);
  EXPECT_EQ(max_abs_diff(back.w, w.w), 0.0);  // shortest-round-trip doubles
  EXPECT_EQ(back.evidence.min_product_value, w.evidence.min_product_value);
  EXPECT_EQ(back.evidence.restarts, w.evidence.restarts);
}

TEST(Io, DensityAndPovmListRoundTrip) {
  Rng rng(160);
  const Matrix rho = random_density(4, rng);
  const std::string dpath = temp_path("rho.json");
  save_density(dpath, rho, 2, 2);
  const DensityFile loaded = density_from_json(load_json(dpath));
  EXPECT_EQ(max_abs_diff(loaded.rho, rho), 0.0);

  const std::vector<Povm> povms = {random_povm(2, 3, 5), qubit_projective(0.3, 0.7)};
  const std::string ppath = temp_path("povms.json");
  save_povm_list(ppath, povms);
  const std::vector<Povm> back = povm_list_from_json(load_json(ppath));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(max_abs_diff(back[0].elements[2], povms[0].elements[2]), 0.0);
}

TEST(Io, TableAndSimulationRoundTrip) {
  const std::string tpath = temp_path("pr.json");
  save_table(tpath, pr_box());
  const CorrelationTable t = table_from_json(load_json(tpath));
  EXPECT_DOUBLE_EQ(chsh_value(t), 1.0);

  const PoptState w = choi_of_transpose(2);
  const QuantumSimulation sim = quantize(w);
  const std::string spath = temp_path("sim.json");
  save_simulation(spath, sim);
  const QuantumSimulation back = simulation_from_json(load_json(spath));
  EXPECT_EQ(back.d, 2);
  EXPECT_EQ(max_abs_diff(back.sigma, sim.sigma), 0.0);
  EXPECT_EQ(back.decomposition.epsilon, sim.decomposition.epsilon);
  // the reloaded simulation still verifies against W
  EXPECT_LE(verify_simulation(w, back, 20, 3), 1e-10);
}

TEST(Io, TruncatedJsonIsParseError) {
  const std::string path = temp_path("trunc.json");
  {
    std::ofstream out(path);
    out << "{ \"kind\": \"popt\", \"dims\": [2, 2], \"matrix\": [[[1, 0]";
  }
  EXPECT_THROW(load_json(path), ParseError);
}

TEST(Io, MissingFileIsParseError) {
  EXPECT_THROW(load_json(temp_path("does_not_exist.json")), ParseError);
}

TEST(Io, BadTraceIsInvariantViolation) {
  const PoptState w = choi_of_transpose(2);
  Json j = popt_to_json(w);
  j["matrix"][0][0][0] = 0.4;  // tr(W) becomes 0.9
  try {
    popt_from_json(j);
    FAIL() << "expected InvariantViolation";
  } catch (const InvariantViolation& e) {
    EXPECT_NE(std::string(e.what()).find("tr(W)"), std::string::npos);
  }
}

TEST(Io, NonHermitianPoptIsInvariantViolation) {
  const PoptState w = choi_of_transpose(2);
  Json j = popt_to_json(w);
  j["matrix"][0][1][0] = 0.7;  // break conjugate symmetry
  EXPECT_THROW(popt_from_json(j), InvariantViolation);
}

TEST(Io, WrongKindIsParseError) {
  const PoptState w = choi_of_transpose(2);
  const Json j = popt_to_json(w);
  EXPECT_THROW(density_from_json(j), ParseError);
}

TEST(Io, NonFiniteEntriesAreRejected) {
  const std::string path = temp_path("huge.json");
  {
    std::ofstream out(path);
    // overflows double -> nlohmann parse error -> ParseError
    out << "{ \"kind\": \"popt\", \"dims\": [2, 2], \"matrix\": [[[1e999, 0]]] }";
  }
  EXPECT_THROW(
      [&] {
        const Json j = load_json(path);
        popt_from_json(j);
      }(),
      ParseError);
}

TEST(Io, SimulationInvariantsChecked) {
  const PoptState w = choi_of_transpose(2);
  const QuantumSimulation sim = quantize(w);
  Json j = simulation_to_json(sim);
  j["sigma"][0][0][0] = 0.9;  // sigma no longer |psi><psi|
  EXPECT_THROW(simulation_from_json(j), InvariantViolation);
}

TEST(Io, NonPsdDensityIsInvariantViolation) {
  Matrix m(4, 4);
  m(0, 0) = -0.1;
  m(1, 1) = 0.5;
  m(2, 2) = 0.3;
  m(3, 3) = 0.3;
  Json j;
  j["kind"] = "density";
  j["dims"] = Json::array({2, 2});
  j["matrix"] = matrix_to_json(m);
  EXPECT_THROW(density_from_json(j), InvariantViolation);
}

}  // namespace
}  // namespace poptsim
