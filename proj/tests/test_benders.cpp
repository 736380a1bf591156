#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>
#include <sstream>

#include "doctest.h"
#include "llfba/benders.hpp"
#include "llfba/errors.hpp"
#include "llfba/formulations.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace llfba;
using namespace llfba::benders;

namespace {

solver::SolveSettings tight_settings() {
  solver::SolveSettings s;
  s.optimality_gap = 1e-9;
  return s;
}

}  // namespace

TEST_CASE("subproblem feasibility on the example loop") {
  const MetabolicModel model = build_example_loop_model();
  const SparseMat si = internal_submatrix(model);
  const auto& backend = solver::builtin_backend();

  SUBCASE("all-forward assignment closes the loop and is infeasible") {
    DirectionAssignment a{{1, 1, 0}};
    CHECK_FALSE(check_subproblem(si, a, 1.0, backend, {}).feasible);
  }
  SUBCASE("breaking the cycle direction restores feasibility") {
    DirectionAssignment a{{1, 1, 1}};
    const auto res = check_subproblem(si, a, 1.0, backend, {});
    REQUIRE(res.feasible);
    // Witness satisfies the signed constraints.
    const Vec dmu = si.transpose() * res.mu;
    CHECK((dmu - res.delta_mu).lpNorm<Eigen::Infinity>() < 1e-9);
    for (int k = 0; k < 3; ++k) CHECK(dmu[k] <= -1.0 + 1e-9);
  }
  SUBCASE("length mismatch rejected") {
    DirectionAssignment a{{1, 1}};
    CHECK_THROWS_AS(check_subproblem(si, a, 1.0, backend, {}), ValidationError);
  }
}

TEST_CASE("find_mis extracts the loop on the example") {
  const MetabolicModel model = build_example_loop_model();
  const SparseMat si = internal_submatrix(model);
  DirectionAssignment a{{1, 1, 0}};
  const std::vector<double> weights(3, 1.0);
  const auto mis =
      find_mis(si, a, 1.0, weights, model.internal_indices, solver::builtin_backend(), {});
  REQUIRE(mis.has_value());
  CHECK(mis->indices == std::vector<int>{1, 2, 3});
  CHECK(mis->refuted_values == std::vector<int>{1, 1, 0});
  // Feasible assignment yields no subsystem.
  DirectionAssignment ok{{1, 1, 1}};
  CHECK_FALSE(
      find_mis(si, ok, 1.0, weights, model.internal_indices, solver::builtin_backend(), {})
          .has_value());
}

TEST_CASE("MIS matches the exhaustive oracle on random infeasible assignments") {
  int checked = 0;
  for (std::uint64_t seed = 200; seed < 240; ++seed) {
    const MetabolicModel model = llfba::test::random_model(seed);
    const SparseMat si = internal_submatrix(model);
    const int ni = model.num_internal();
    for (unsigned mask = 0; mask < (1u << ni); mask += 3) {
      std::vector<int> bits(ni);
      for (int k = 0; k < ni; ++k) bits[k] = (mask >> k) & 1u;
      if (llfba::test::oracle_sp_feasible(si, bits, 1.0)) continue;
      const auto all = llfba::test::oracle_all_mis(si, bits, 1.0, model.internal_indices);
      REQUIRE_FALSE(all.empty());
      DirectionAssignment a{bits};
      const auto mis = find_mis(si, a, 1.0, std::vector<double>(ni, 1.0),
                                model.internal_indices, solver::builtin_backend(), {});
      REQUIRE(mis.has_value());
      INFO("seed ", seed, " mask ", mask);
      CHECK(std::find(all.begin(), all.end(), mis->indices) != all.end());
      ++checked;
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("enumerate_mis produces distinct subsystems and respects max_count") {
  const MetabolicModel model = llfba::test::build_two_cycle_model();
  const SparseMat si = internal_submatrix(model);
  // Close both loops at once.
  DirectionAssignment a{{1, 1, 0, 1, 1, 0}};
  const auto pool = enumerate_mis(si, a, 1.0, 6, model.internal_indices,
                                  solver::builtin_backend(), {});
  CHECK(pool.size() >= 2);
  std::set<std::vector<int>> seen;
  for (const auto& mis : pool) CHECK(seen.insert(mis.indices).second);
  CHECK(seen.count({1, 2, 3}) == 1);
  CHECK(seen.count({6, 7, 8}) == 1);
  const auto single = enumerate_mis(si, a, 1.0, 1, model.internal_indices,
                                    solver::builtin_backend(), {});
  CHECK(single.size() == 1);
}

TEST_CASE("cb_cut over the full internal set equals no_good_cut") {
  const MetabolicModel model = build_example_loop_model();
  DirectionAssignment a{{1, 0, 1}};
  InfeasibleSubsystem full;
  full.indices = model.internal_indices;
  full.refuted_values = a.values;
  CHECK(cb_cut(full) == no_good_cut(a, model.internal_indices));
}

TEST_CASE("cut selection strategies") {
  auto make = [](std::vector<int> idx) {
    InfeasibleSubsystem mis;
    mis.indices = std::move(idx);
    mis.refuted_values.assign(mis.indices.size(), 1);
    return mis;
  };
  const std::vector<InfeasibleSubsystem> pool = {make({1, 2, 3}), make({1, 2, 3}), make({5, 6}),
                                                 make({0, 1, 2, 3, 4})};
  BendersConfig config;
  SUBCASE("all keeps duplicates") {
    config.cut_strategy = CutStrategy::All;
    CHECK(select_cuts(pool, config, 10).size() == 4);
  }
  SUBCASE("distinct deduplicates") {
    config.cut_strategy = CutStrategy::Distinct;
    CHECK(select_cuts(pool, config, 10).size() == 3);
  }
  SUBCASE("k smallest sorts by size") {
    config.cut_strategy = CutStrategy::KSmallest;
    config.k_smallest = 2;
    const auto picked = select_cuts(pool, config, 10);
    REQUIRE(picked.size() == 2);
    CHECK(picked[0].indices == std::vector<int>{5, 6});
    CHECK(picked[1].indices == std::vector<int>{1, 2, 3});
  }
  SUBCASE("density limit filters, never empties") {
    config.cut_strategy = CutStrategy::DensityLimit;
    config.density_limit = 0.25;
    const auto picked = select_cuts(pool, config, 10);
    REQUIRE(picked.size() == 1);
    CHECK(picked[0].indices == std::vector<int>{5, 6});
    config.density_limit = 0.05;
    CHECK(select_cuts(pool, config, 10).size() == 1);
  }
}

TEST_CASE("config validation") {
  BendersConfig config;
  SUBCASE("pct range") {
    config.cuts_per_iter_pct = 120.0;
    CHECK_THROWS_AS(config.validate(), ValidationError);
  }
  SUBCASE("density range") {
    config.cut_strategy = CutStrategy::DensityLimit;
    config.density_limit = 0.0;
    CHECK_THROWS_AS(config.validate(), ValidationError);
  }
  SUBCASE("epsilon positive") {
    config.epsilon = 0.0;
    CHECK_THROWS_AS(config.validate(), ValidationError);
  }
}

TEST_CASE("benders on the example terminates in two master solves") {
  const MetabolicModel model = build_example_loop_model();
  BendersConfig config;
  const auto result =
      solve_llfba_benders(model, config, solver::builtin_backend(), tight_settings());
  REQUIRE(result.report.status == SolveStatus::Optimal);
  CHECK(result.solution.objective_value == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(result.report.iterations == 2);
  CHECK(result.report.cuts == 1);
  REQUIRE(result.report.master_objectives.size() == 2);
  CHECK(result.report.master_objectives[0] == doctest::Approx(40.0));
  CHECK(result.report.master_objectives[1] == doctest::Approx(20.0));
  REQUIRE(result.solution.delta_mu.has_value());
  REQUIRE(result.solution.mu.has_value());
}

TEST_CASE("benders agrees with the oracle across master formulations") {
  const auto settings = tight_settings();
  for (std::uint64_t seed = 300; seed < 320; ++seed) {
    const MetabolicModel model = llfba::test::random_model(seed);
    const auto expected = llfba::test::oracle_llfba(model);
    REQUIRE(expected.status == llfba::test::OracleStatus::Optimal);
    for (auto mf :
         {MasterFormulation::BigM, MasterFormulation::Indicator, MasterFormulation::Both}) {
      BendersConfig config;
      config.master_formulation = mf;
      const auto result =
          solve_llfba_benders(model, config, solver::builtin_backend(), settings);
      INFO("seed ", seed, " master ", to_string(mf));
      REQUIRE(result.report.status == SolveStatus::Optimal);
      CHECK(result.solution.objective_value ==
            doctest::Approx(expected.objective).epsilon(1e-6));
    }
  }
}

TEST_CASE("combinatorial cuts beat no-good cuts on the two-cycle model") {
  const MetabolicModel model = llfba::test::build_two_cycle_model();
  BendersConfig cb;
  BendersConfig nogood;
  nogood.no_good_only = true;
  const auto cb_result =
      solve_llfba_benders(model, cb, solver::builtin_backend(), tight_settings());
  const auto ng_result =
      solve_llfba_benders(model, nogood, solver::builtin_backend(), tight_settings());
  REQUIRE(cb_result.report.status == SolveStatus::Optimal);
  REQUIRE(ng_result.report.status == SolveStatus::Optimal);
  CHECK(cb_result.solution.objective_value == doctest::Approx(40.0).epsilon(1e-9));
  CHECK(ng_result.solution.objective_value == doctest::Approx(40.0).epsilon(1e-9));
  CHECK(cb_result.report.iterations < ng_result.report.iterations);
}

TEST_CASE("multi-cut never needs more master solves than single-cut") {
  const MetabolicModel model = llfba::test::build_two_cycle_model();
  BendersConfig single;
  BendersConfig multi;
  multi.cuts_per_iter_pct = 50.0;
  const auto one =
      solve_llfba_benders(model, single, solver::builtin_backend(), tight_settings());
  const auto many =
      solve_llfba_benders(model, multi, solver::builtin_backend(), tight_settings());
  REQUIRE(one.report.status == SolveStatus::Optimal);
  REQUIRE(many.report.status == SolveStatus::Optimal);
  CHECK(many.report.iterations <= one.report.iterations);
  CHECK(many.report.iterations == 2);
  CHECK(one.report.iterations == 3);
}

TEST_CASE("mis observer sees every emitted subsystem") {
  const MetabolicModel model = llfba::test::build_two_cycle_model();
  BendersConfig config;
  config.cuts_per_iter_pct = 50.0;
  int seen = 0;
  config.on_mis = [&](const InfeasibleSubsystem& mis) {
    ++seen;
    CHECK_FALSE(mis.indices.empty());
  };
  const auto result =
      solve_llfba_benders(model, config, solver::builtin_backend(), tight_settings());
  REQUIRE(result.report.status == SolveStatus::Optimal);
  CHECK(seen >= static_cast<int>(result.report.cuts));
}

TEST_CASE("report csv row matches the header schema") {
  SolveReport report;
  report.instance = "model.json";
  report.method = "benders";
  report.formulation = "bigm";
  report.strategy = "distinct";
  report.status = SolveStatus::Optimal;
  report.objective = 20.0;
  report.iterations = 2;
  report.cuts = 1;
  report.wall_time_s = 0.5;
  const std::string header = SolveReport::csv_header();
  const std::string row = report.csv_row();
  const auto count = [](const std::string& s) {
    return std::count(s.begin(), s.end(), ',');
  };
  CHECK(count(header) == count(row));
  CHECK(row.find("model.json,benders,bigm,0,distinct,Optimal,20,2,1,0.5") == 0);
}

TEST_CASE("infeasible master propagates") {
  MetabolicModel model = build_example_loop_model();
  // Force a contradiction: r1 must run but r5 cannot drain C.
  model.lower_bounds[0] = 5.0;
  model.upper_bounds[4] = 0.0;
  model.lower_bounds[4] = 0.0;
  BendersConfig config;
  const auto result =
      solve_llfba_benders(model, config, solver::builtin_backend(), tight_settings());
  CHECK(result.report.status == SolveStatus::Infeasible);
}
