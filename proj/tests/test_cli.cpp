#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "hkt/commands.hpp"

using namespace hkt;
using cmd::json;

namespace {

json sample(const std::string& name) {
  std::ifstream in(std::string(HKT_SAMPLES_DIR) + "/" + name);
  return json::parse(in);
}

json without_timings(json j) {
  j.erase("timings");
  return j;
}

int run_cli(const std::string& args) {
  const std::string line = std::string(HKT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(line.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Identities, AllPassOnOneQuaternionicDimension) {
  const auto r = cmd::cmd_identities({{1}, 42, 50});
  EXPECT_EQ(r.exit_code, cmd::kPass);
  EXPECT_TRUE(r.report["pass"].get<bool>());
  EXPECT_EQ(r.report["seed"], 42);
  for (const auto& c : r.report["checks"]) {
    EXPECT_TRUE(c["pass"].get<bool>()) << c.dump();
    EXPECT_EQ(c["cases"], 50);
  }
  EXPECT_TRUE(r.report["warnings"].empty());
}

TEST(Identities, CountZeroIsVacuousWithWarning) {
  const auto r = cmd::cmd_identities({{1, 2}, 1, 0});
  EXPECT_EQ(r.exit_code, cmd::kPass);
  ASSERT_EQ(r.report["warnings"].size(), 1u);
}

TEST(Identities, DeterministicUnderSeed) {
  const auto a = cmd::cmd_identities({{1, 2}, 7, 5});
  const auto b = cmd::cmd_identities({{1, 2}, 7, 5});
  EXPECT_EQ(without_timings(a.report).dump(), without_timings(b.report).dump());
}

TEST(Identities, RejectsUnsupportedN) {
  EXPECT_THROW(cmd::cmd_identities({{3}, 1, 1}), io::InputError);
}

TEST(Check, FlatMetricIsHKTWithZeroStrongTorsion) {
  const auto r = cmd::cmd_check(sample("flat_metric.json"));
  EXPECT_EQ(r.exit_code, cmd::kPass);
  const auto& res = r.report["result"];
  EXPECT_TRUE(res["hkt"].get<bool>());
  EXPECT_TRUE(res["criteria_agree"].get<bool>());
  EXPECT_TRUE(res["torsion"]["zero"].get<bool>());
  EXPECT_TRUE(res["torsion"]["strong"].get<bool>());
}

TEST(Check, ConformalMetricHasTorsion) {
  const auto r = cmd::cmd_check(sample("conformal_metric.json"));
  EXPECT_EQ(r.exit_code, cmd::kPass);
  EXPECT_TRUE(r.report["result"]["hkt"].get<bool>());
  EXPECT_FALSE(r.report["result"]["torsion"]["zero"].get<bool>());
}

TEST(Check, RandomFormOnTwoQuaternionicDimensionsIsNotHKT) {
  const auto r = cmd::cmd_check(sample("random_form_n2.json"));
  EXPECT_EQ(r.exit_code, cmd::kCheckFailure);
  const auto& res = r.report["result"];
  EXPECT_FALSE(res["hkt"].get<bool>());
  EXPECT_TRUE(res["criteria_agree"].get<bool>());
  EXPECT_GT(res["salamon"]["residual"]["nonzero_terms"].get<std::size_t>(), 0u);
  EXPECT_TRUE(res["torsion"].is_null());
}

TEST(Check, FlatPotential) {
  const auto r = cmd::cmd_check(sample("flat_potential.json"));
  EXPECT_EQ(r.exit_code, cmd::kPass);
  const auto& res = r.report["result"];
  EXPECT_TRUE(res["d_theta_equals_F_I"].get<bool>());
  EXPECT_TRUE(res["is_potential_for_g"].get<bool>());
  EXPECT_EQ(io::form_from_json(res["forms"][0]), RealForm::basis(4, {0, 1}) + RealForm::basis(4, {2, 3}));
}

TEST(Check, ConformalDocumentUsesDefinition) {
  const auto r = cmd::cmd_check(sample("conformal_bump.json"));
  EXPECT_EQ(r.exit_code, cmd::kPass);
  EXPECT_TRUE(r.report["result"]["definition"]["holds"].get<bool>());
}

TEST(Check, NonInvariantMetricIsInputErrorWithLocation) {
  json doc = sample("flat_metric.json");
  doc["payload"]["g"][0][0] = io::to_json(RationalPolynomial::constant(4, Rational(2)));
  try {
    cmd::cmd_check(doc);
    FAIL();
  } catch (const io::InputError& e) {
    EXPECT_EQ(e.where(), "/payload/g");
  }
}

TEST(Check, ReportsCarryDigestAndAreDeterministic) {
  const json doc = sample("random_form_n2.json");
  const auto a = cmd::cmd_check(doc, {3});
  const auto b = cmd::cmd_check(doc, {3});
  EXPECT_EQ(without_timings(a.report).dump(), without_timings(b.report).dump());
  EXPECT_EQ(a.report["input_digest"], cmd::digest(doc));
  EXPECT_NE(cmd::digest(doc), cmd::digest(sample("flat_metric.json")));
}

TEST(Solve, FlatManufacturedSolution) {
  cmd::SolveOptions opt;
  opt.grids = {9};
  const auto r = cmd::cmd_solve(sample("flat_solve.json"), opt);
  EXPECT_EQ(r.exit_code, cmd::kPass);
  const auto& g = r.report["grids"][0];
  EXPECT_LT(g["max_deviation_from_dirichlet_polynomial"].get<double>(), 10 * opt.tolerance);
  EXPECT_LT(g["trace_residual_max"].get<double>(), 1e-6);
  EXPECT_EQ(r.csv.substr(0, r.csv.find('\n')), "x0,x1,x2,x3,mu");
}

TEST(Solve, OrderEstimateBetweenNestedGrids) {
  cmd::SolveOptions opt;
  opt.grids = {5, 9, 11};
  const auto r = cmd::cmd_solve(sample("conformal_bump.json"), opt);
  const auto& grids = r.report["grids"];
  EXPECT_FALSE(grids[0].contains("order_estimate"));
  const double order = grids[1]["order_estimate"].get<double>();
  EXPECT_GT(order, 1.0);
  EXPECT_TRUE(grids[2]["order_estimate"].is_null());
}

TEST(Solve, FactorWithZeroFailsBeforeAssembly) {
  try {
    cmd::cmd_solve(sample("phi_with_zero.json"));
    FAIL();
  } catch (const io::InputError& e) {
    EXPECT_EQ(e.where(), "/payload/phi");
  }
}

TEST(Solve, BadArguments) {
  cmd::SolveOptions opt;
  opt.grids = {8};
  EXPECT_THROW(cmd::cmd_solve(sample("conformal_bump.json"), opt), io::InputError);
  EXPECT_THROW(cmd::cmd_solve(sample("flat_metric.json")), io::InputError);
}

TEST(Binary, ExitCodes) {
  const std::string samples = HKT_SAMPLES_DIR;
  EXPECT_EQ(run_cli("--n 1 --count 2"), 0);
  EXPECT_EQ(run_cli("identities --n 1 --seed 42 --count 3"), 0);
  EXPECT_EQ(run_cli("check " + samples + "/flat_metric.json"), 0);
  EXPECT_EQ(run_cli("check " + samples + "/random_form_n2.json"), 1);
  EXPECT_EQ(run_cli("check " + samples + "/missing.json"), 2);
  EXPECT_EQ(run_cli("solve " + samples + "/phi_with_zero.json --grid 5"), 2);
  EXPECT_EQ(run_cli("solve " + samples + "/conformal_bump.json --grid 9 --tol 1e-300"), 3);
}

TEST(Binary, WritesReportAndCsv) {
  const auto dir = std::filesystem::temp_directory_path() / "hkt_cli_test_out";
  std::filesystem::remove_all(dir);
  ASSERT_EQ(run_cli("solve " + std::string(HKT_SAMPLES_DIR) + "/flat_solve.json --grid 5 --out " + dir.string()), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "mu_slice.csv"));
  std::ifstream in(dir / "report.json");
  EXPECT_EQ(json::parse(in)["command"], "solve");
  std::filesystem::remove_all(dir);
}
