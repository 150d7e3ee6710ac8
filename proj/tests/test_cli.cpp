#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#ifndef POPTSIM_CLI_PATH
#error "POPTSIM_CLI_PATH must be defined"
#endif

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout only
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(POPTSIM_CLI_PATH) + " " + args + " 2>/dev/null";
  std::array<char, 4096> buffer{};
  CliResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return result;
  while (fgets(buffer.data(), buffer.size(), pipe) != nullptr) result.output += buffer.data();
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string temp_file(const std::string& name) {
  return (fs::path(::testing::TempDir()) / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double value_after(const std::string& text, const std::string& key) {
  const auto pos = text.find(key);
  if (pos == std::string::npos) return std::nan("");
  return std::stod(text.substr(pos + key.size()));
}

TEST(Cli, GenQuantizeVerifyPipeline) {
  const std::string w = temp_file("swap.json");
  const std::string sim = temp_file("sim.json");
  EXPECT_EQ(run_cli("--out " + w + " gen swap --d 2").exit_code, 0);
  EXPECT_EQ(run_cli("--out " + sim + " quantize --in " + w).exit_code, 0);
  const CliResult verify = run_cli("verify --popt " + w + " --sim " + sim);
  EXPECT_EQ(verify.exit_code, 0);
  const double dev = value_after(verify.output, "max_deviation = ");
  EXPECT_LE(dev, 1e-8);
}

TEST(Cli, ChshOnPrBoxPrintsOne) {
  const std::string table = temp_file("pr_box.json");
  EXPECT_EQ(run_cli("--out " + table + " gen pr-box").exit_code, 0);
  const CliResult r = run_cli("chsh --table " + table);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_DOUBLE_EQ(value_after(r.output, "chsh(table) = "), 1.0);
  EXPECT_NE(r.output.find("classical_max = 0.75"), std::string::npos);
  EXPECT_NE(r.output.find("no_signaling = ok"), std::string::npos);
}

TEST(Cli, CheckWitnessesNegativeDiagonal) {
  const std::string path = temp_file("bad_popt.json");
  {
    std::ofstream out(path);
    out << R"({"kind": "popt", "dims": [2, 2], "matrix": [)"
        << R"([[-0.2,0],[0,0],[0,0],[0,0]],)"
        << R"([[0,0],[0.4,0],[0,0],[0,0]],)"
        << R"([[0,0],[0,0],[0.4,0],[0,0]],)"
        << R"([[0,0],[0,0],[0,0],[0.4,0]]]})";
  }
  const CliResult r = run_cli("check --in " + path);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("not_popt"), std::string::npos);
  EXPECT_NE(r.output.find("witness"), std::string::npos);
}

TEST(Cli, ClassifiesSwapBeyondQuantum) {
  const std::string w = temp_file("swap3.json");
  EXPECT_EQ(run_cli("--out " + w + " gen swap --d 3").exit_code, 0);
  const CliResult r = run_cli("check --in " + w);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("popt_beyond_quantum"), std::string::npos);
}

TEST(Cli, ExitCode2OnParseError) {
  const std::string path = temp_file("trunc.json");
  {
    std::ofstream out(path);
    out << "{ \"kind\": \"popt\", ";
  }
  EXPECT_EQ(run_cli("check --in " + path).exit_code, 2);
}

TEST(Cli, ExitCode3OnInvariantViolation) {
  const std::string path = temp_file("bad_trace.json");
  {
    std::ofstream out(path);
    out << R"({"kind": "popt", "dims": [2, 2], "matrix": [)"
        << R"([[0.4,0],[0,0],[0,0],[0,0]],)"
        << R"([[0,0],[0.1,0],[0,0],[0,0]],)"
        << R"([[0,0],[0,0],[0.1,0],[0,0]],)"
        << R"([[0,0],[0,0],[0,0],[0.3,0]]]})";
  }
  EXPECT_EQ(run_cli("check --in " + path).exit_code, 3);
}

TEST(Cli, DeterministicOutputsForIdenticalCommandLines) {
  const std::string a = temp_file("det_a.json");
  const std::string b = temp_file("det_b.json");
  EXPECT_EQ(run_cli("--seed 7 --out " + a + " gen pt-random --d 2").exit_code, 0);
  EXPECT_EQ(run_cli("--seed 7 --out " + b + " gen pt-random --d 2").exit_code, 0);
  EXPECT_EQ(slurp(a), slurp(b));

  const std::string sim_a = temp_file("det_sim_a.json");
  const std::string sim_b = temp_file("det_sim_b.json");
  EXPECT_EQ(run_cli("--out " + sim_a + " quantize --in " + a).exit_code, 0);
  EXPECT_EQ(run_cli("--out " + sim_b + " quantize --in " + b).exit_code, 0);
  EXPECT_EQ(slurp(sim_a), slurp(sim_b));
}

TEST(Cli, QuantizeAutoRetriesSingularImage) {
  const std::string w = temp_file("basis00.json");
  const std::string sim = temp_file("basis00_sim.json");
  EXPECT_EQ(run_cli("--out " + w + " gen basis00 --d 2").exit_code, 0);
  const CliResult r = run_cli("--out " + sim + " quantize --in " + w);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("epsilon = 1e-06"), std::string::npos);
  // deviation for the epsilon path stays within the documented linear bound
  const CliResult verify = run_cli("--tol 1e-5 verify --popt " + w + " --sim " + sim);
  EXPECT_EQ(verify.exit_code, 0);
}

TEST(Cli, LpBoundWithinFrozenBracket) {
  const CliResult r = run_cli("lp-bound --n 10000");
  EXPECT_EQ(r.exit_code, 0);
  const double bound = value_after(r.output, "lp_bound = ");
  EXPECT_GE(bound, 0.853553);
  EXPECT_LE(bound, 0.87);
}

TEST(Cli, ReconstructPipeline) {
  const std::string w = temp_file("rec_src.json");
  const std::string out = temp_file("rec_out.json");
  EXPECT_EQ(run_cli("--seed 5 --out " + w + " gen pt-random --d 2").exit_code, 0);
  const CliResult r = run_cli("--out " + out + " reconstruct --in " + w);
  EXPECT_EQ(r.exit_code, 0);
  const double err = value_after(r.output, "frobenius_error = ");
  EXPECT_LE(err, 1e-8);
  EXPECT_NE(r.output.find("oracle_no_signaling = ok"), std::string::npos);
  EXPECT_TRUE(fs::exists(out));
}

TEST(Cli, ReconstructFromSavedTabulation) {
  const std::string w = temp_file("tab_src.json");
  const std::string tab = temp_file("tab.json");
  const std::string direct = temp_file("tab_rec_direct.json");
  const std::string via = temp_file("tab_rec_via.json");
  EXPECT_EQ(run_cli("--seed 9 --out " + w + " gen pt-random --d 2").exit_code, 0);
  EXPECT_EQ(run_cli("--seed 11 --out " + direct + " reconstruct --in " + w +
                    " --save-tabulation " + tab)
                .exit_code,
            0);
  // the same seed regenerates the same IC frames for the tabulation route
  EXPECT_EQ(run_cli("--seed 11 --out " + via + " reconstruct --tabulation " + tab).exit_code, 0);
  EXPECT_EQ(slurp(direct), slurp(via));
}

TEST(Cli, UnequalDimsArePaddedAtTheBoundary) {
  // a maximally mixed state on 2 (x) 3 loads as a zero-padded 3 (x) 3 state
  const std::string path = temp_file("rect.json");
  {
    std::ofstream out(path);
    out << R"({"kind": "density", "dims": [2, 3], "matrix": [)";
    for (int i = 0; i < 6; ++i) {
      out << "[";
      for (int j = 0; j < 6; ++j) {
        out << "[" << (i == j ? "0.16666666666666666" : "0") << ",0]" << (j < 5 ? "," : "");
      }
      out << "]" << (i < 5 ? "," : "");
    }
    out << "]}";
  }
  const CliResult r = run_cli("check --in " + path);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("quantum"), std::string::npos);
}

TEST(Cli, JsonFlagEmitsSingleLine) {
  const CliResult r = run_cli("--json chsh");
  EXPECT_EQ(r.exit_code, 0);
  const auto pos = r.output.rfind("{\"");
  ASSERT_NE(pos, std::string::npos);
  const std::string line = r.output.substr(pos);
  EXPECT_NE(line.find("\"classical_max\":0.75"), std::string::npos);
}

}  // namespace
