#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "llfba/bench.hpp"
#include "llfba/benders.hpp"
#include "llfba/enzyme.hpp"
#include "llfba/errors.hpp"
#include "llfba/formulations.hpp"
#include "llfba/model_io.hpp"
#include "llfba/verifier.hpp"

namespace {

using namespace llfba;

int cmd_solve(const std::string& model_path, bench::MethodSpec spec, double time_limit,
              std::uint64_t seed, const std::optional<std::string>& out_path,
              const std::optional<std::string>& lp_dump) {
  const auto& backend = solver::default_backend();
  solver::SolveSettings settings;
  settings.time_limit_s = time_limit;
  settings.seed = seed;

  MetabolicModel model = io::load_model(model_path);

  if (lp_dump && spec.name != "benders" && spec.name != "nogood" && spec.name != "fba") {
    LooplessConfig config;
    config.epsilon = spec.epsilon;
    config.big_m = spec.big_m;
    config.formulation = spec.name == "hull"        ? LooplessFormulation::Hull
                         : spec.name == "indicator" ? LooplessFormulation::Indicator
                                                    : LooplessFormulation::BigM;
    std::ofstream out(*lp_dump);
    if (!out) throw IoError("cannot open file for writing: " + *lp_dump);
    solver::write_lp_format(
        build_llfba_problem(model, config, backend.supports_indicators()), out);
  }

  auto rows = bench::run_benchmark({model_path}, {spec}, settings, backend);
  const auto& row = rows.at(0);
  std::cout << benders::SolveReport::csv_header() << "\n" << row.csv_row() << "\n";

  if (out_path) {
    // Re-solve through the library to recover the full solution vector.
    FluxSolution solution;
    if (spec.name == "benders" || spec.name == "nogood") {
      benders::BendersConfig config;
      config.master_formulation = spec.master;
      config.cuts_per_iter_pct = spec.pct;
      config.cut_strategy = spec.strategy;
      config.k_smallest = spec.k_smallest;
      config.density_limit = spec.density_limit;
      config.no_good_only = spec.name == "nogood";
      config.epsilon = spec.epsilon;
      config.big_m = spec.big_m;
      solution = benders::solve_llfba_benders(model, config, backend, settings).solution;
    } else if (spec.name == "fba") {
      solution = solve_fba(model, backend, settings);
    } else {
      LooplessConfig config;
      config.epsilon = spec.epsilon;
      config.big_m = spec.big_m;
      config.formulation = spec.name == "hull"        ? LooplessFormulation::Hull
                           : spec.name == "indicator" ? LooplessFormulation::Indicator
                                                      : LooplessFormulation::BigM;
      solution = solve_llfba(model, config, backend, settings);
    }
    io::save_solution(model, solution, *out_path);
  }
  return row.status == SolveStatus::Optimal ? 0 : 1;
}

int cmd_verify(const std::string& model_path, const std::string& solution_path, double epsilon) {
  MetabolicModel model = io::load_model(model_path);
  FluxSolution solution = io::load_solution(model, solution_path);
  auto result = verifier::verify_loopless(model, solution.v, epsilon);
  if (result.certified) {
    std::cout << "loopless\n";
    return 0;
  }
  std::cout << "cycle:";
  for (int i : result.cycle) std::cout << ' ' << model.reaction_ids[i];
  std::cout << "\n";
  return 1;
}

int cmd_bench(const std::string& grid_path, const std::optional<std::string>& out_path) {
  bench::Grid grid = bench::load_grid(grid_path);
  auto rows =
      bench::run_benchmark(grid.instances, grid.methods, grid.settings, solver::default_backend());
  if (out_path) {
    std::ofstream out(*out_path);
    if (!out) throw IoError("cannot open file for writing: " + *out_path);
    bench::write_report_csv(rows, out);
  } else {
    bench::write_report_csv(rows, std::cout);
  }
  return 0;
}

int cmd_aggregate(const std::string& report_path, double time_limit,
                  const std::optional<std::string>& profile_path) {
  std::ifstream in(report_path);
  if (!in) throw ParseError("cannot open report: " + report_path);
  auto rows = bench::read_report_csv(in);
  bench::write_aggregate(bench::aggregate(rows, time_limit), std::cout);
  if (profile_path) {
    std::ofstream out(*profile_path);
    if (!out) throw IoError("cannot open file for writing: " + *profile_path);
    bench::write_profile(bench::make_performance_profile(rows), out);
  }
  return 0;
}

int cmd_gen_enzyme(const std::string& model_path, std::uint64_t seed, const std::string& out_path) {
  MetabolicModel model = io::load_model(model_path);
  auto split = enzyme::split_reversible(model);
  enzyme::save_enzyme_data(enzyme::generate_enzyme_data(split.model, seed), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loopless flux balance analysis toolkit"};
  app.require_subcommand(1);

  std::string model_path, solution_path, grid_path, report_path;
  std::string method = "bigm";
  std::string master = "bigm";
  std::string strategy = "distinct";
  double pct = 0.0;
  double epsilon = 1.0;
  double time_limit = 1800.0;
  double big_m = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::string> enzyme_path, out_path, lp_dump, profile_path;

  auto* solve = app.add_subcommand("solve", "Solve a model with one method");
  solve->add_option("model", model_path, "model JSON file")->required();
  solve->add_option("--method", method,
                    "fba | bigm | indicator | hull | benders | nogood, with optional "
                    ":key=value options");
  solve->add_option("--master", master, "benders master links: bigm | indicator | both");
  solve->add_option("--pct", pct, "cuts per iteration as % of reactions (0 = single cut)");
  solve->add_option("--strategy", strategy, "cut selection: all | distinct | ksmallest | density");
  solve->add_option("--epsilon", epsilon, "thermodynamic margin");
  solve->add_option("--big-m", big_m, "big-M override (0 = max |bound|)");
  solve->add_option("--time-limit", time_limit, "wall-clock limit in seconds");
  solve->add_option("--seed", seed, "engine seed");
  solve->add_option("--enzyme", enzyme_path, "enzyme data JSON for the constrained variant");
  solve->add_option("--out", out_path, "write the solution JSON here");
  solve->add_option("--lp-dump", lp_dump, "write the formulation in LP format here");

  auto* verify = app.add_subcommand("verify", "Check a stored solution for internal cycles");
  verify->add_option("model", model_path, "model JSON file")->required();
  verify->add_option("solution", solution_path, "solution JSON file")->required();
  verify->add_option("--epsilon", epsilon, "thermodynamic margin");

  auto* bench_cmd = app.add_subcommand("bench", "Run a method x instance grid");
  bench_cmd->add_option("grid", grid_path, "grid file (key = value lines)")->required();
  bench_cmd->add_option("--out", out_path, "write the CSV report here (default stdout)");

  auto* aggregate = app.add_subcommand("aggregate", "Summarize a benchmark report");
  aggregate->add_option("report", report_path, "report CSV")->required();
  aggregate->add_option("--time-limit", time_limit, "limit used for unsolved rows");
  aggregate->add_option("--profile", profile_path, "write performance-profile CSV here");

  auto* gen = app.add_subcommand("gen-enzyme", "Generate seeded enzyme data for a model");
  gen->add_option("model", model_path, "model JSON file")->required();
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--out", out_path, "output enzyme data path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      auto spec = llfba::bench::MethodSpec::parse(method);
      // Flags override only when the method string did not set them.
      if (method.find(':') == std::string::npos) {
        spec.master = llfba::bench::MethodSpec::parse("benders:master=" + master).master;
        spec.pct = pct;
        spec.strategy =
            llfba::bench::MethodSpec::parse("benders:strategy=" + strategy).strategy;
        spec.epsilon = epsilon;
        if (big_m > 0.0) spec.big_m = big_m;
        spec.enzyme_data_path = enzyme_path;
      }
      return cmd_solve(model_path, spec, time_limit, seed, out_path, lp_dump);
    }
    if (verify->parsed()) return cmd_verify(model_path, solution_path, epsilon);
    if (bench_cmd->parsed()) return cmd_bench(grid_path, out_path);
    if (aggregate->parsed()) return cmd_aggregate(report_path, time_limit, profile_path);
    if (gen->parsed()) return cmd_gen_enzyme(model_path, seed, *out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
