#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hkt/commands.hpp"

namespace {

using hkt::cmd::json;

json read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hkt::io::InputError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw hkt::io::InputError(path, std::string("invalid JSON: ") + e.what());
  }
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

int emit(const hkt::cmd::CommandResult& r, const std::string& out_dir) {
  const std::string text = r.report.dump(2) + "\n";
  std::cout << text;
  if (r.report.contains("warnings")) {
    for (const auto& w : r.report["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
  }
  if (r.report.contains("first_failure")) std::cerr << "failed: " << r.report["first_failure"].get<std::string>() << "\n";
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_file(std::filesystem::path(out_dir) / "report.json", text);
    if (!r.csv.empty()) write_file(std::filesystem::path(out_dir) / "mu_slice.csv", r.csv);
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact HKT calculus on the flat quaternionic model and a 4D potential solver"};
  app.require_subcommand(0, 1);

  hkt::cmd::IdentitiesOptions id_opt;
  std::uint64_t seed = 42;
  std::string out_dir;
  app.add_option("--n", id_opt.n, "quaternionic dimensions for the identity suite")->delimiter(',');
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--count", id_opt.count, "random cases per battery")->capture_default_str();
  app.add_option("--out", out_dir, "directory for report.json (and mu_slice.csv)");

  auto* identities = app.add_subcommand("identities", "run the identity suite (default)");
  identities->fallthrough();

  std::string check_file;
  auto* check = app.add_subcommand("check", "HKT checks on a metric, form, potential or conformal4d document");
  check->add_option("file", check_file, "input document")->required();
  check->fallthrough();

  std::string solve_file;
  hkt::cmd::SolveOptions solve_opt;
  auto* solve = app.add_subcommand("solve", "solve for a potential of a conformal4d document");
  solve->add_option("file", solve_file, "input document")->required();
  solve->add_option("--grid", solve_opt.grids, "grid sizes per axis, e.g. 9,17")->delimiter(',');
  solve->add_option("--tol", solve_opt.tolerance, "linear solver tolerance")->capture_default_str();
  solve->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) return emit(hkt::cmd::cmd_check(read_document(check_file), {seed}), out_dir);
    if (*solve) {
      solve_opt.seed = seed;
      return emit(hkt::cmd::cmd_solve(read_document(solve_file), solve_opt), out_dir);
    }
    id_opt.seed = seed;
    return emit(hkt::cmd::cmd_identities(id_opt), out_dir);
  } catch (const hkt::io::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return hkt::cmd::kInputError;
  } catch (const hkt::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return hkt::cmd::kSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hkt::cmd::kCheckFailure;
  }
}
