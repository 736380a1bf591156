#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "llfba/errors.hpp"
#include "llfba/formulations.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace llfba;

namespace {

solver::SolveSettings tight_settings() {
  solver::SolveSettings s;
  s.optimality_gap = 1e-9;
  return s;
}

void check_certificate(const MetabolicModel& model, const FluxSolution& sol, double epsilon) {
  REQUIRE(sol.delta_mu.has_value());
  REQUIRE(sol.mu.has_value());
  const SparseMat si = internal_submatrix(model);
  const Vec dmu = si.transpose() * *sol.mu;
  CHECK((dmu - *sol.delta_mu).lpNorm<Eigen::Infinity>() < 1e-5);
  for (int k = 0; k < model.num_internal(); ++k) {
    const double v = sol.v[model.internal_indices[k]];
    if (v > 1e-6) CHECK((*sol.delta_mu)[k] <= -epsilon + 1e-5);
    if (v < -1e-6) CHECK((*sol.delta_mu)[k] >= epsilon - 1e-5);
  }
}

}  // namespace

TEST_CASE("FBA on the example loop model") {
  const MetabolicModel model = build_example_loop_model();
  const FluxSolution sol = solve_fba(model, solver::builtin_backend(), tight_settings());
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(40.0).epsilon(1e-9));
  // The known optimum is feasible and attains the same value.
  Vec v_star(5);
  v_star << 10, 30, 30, -20, 10;
  CHECK((model.stoichiometry * v_star).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(model.objective.dot(v_star) == doctest::Approx(sol.objective_value));
}

TEST_CASE("all three monolithic formulations give 20 on the example") {
  const MetabolicModel model = build_example_loop_model();
  LooplessConfig config;
  for (auto f :
       {LooplessFormulation::BigM, LooplessFormulation::Indicator, LooplessFormulation::Hull}) {
    config.formulation = f;
    const FluxSolution sol =
        solve_llfba(model, config, solver::builtin_backend(), tight_settings());
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(20.0).epsilon(1e-9));
    check_certificate(model, sol, config.epsilon);
  }
}

TEST_CASE("indicator formulation falls back to big-M rows when unsupported") {
  const MetabolicModel model = build_example_loop_model();
  LooplessConfig config;
  config.formulation = LooplessFormulation::Indicator;
  const FluxSolution sol =
      solve_llfba(model, config, solver::bigm_only_backend(), tight_settings());
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(20.0).epsilon(1e-9));

  config.allow_indicator_fallback = false;
  CHECK_THROWS_AS(solve_llfba(model, config, solver::bigm_only_backend(), tight_settings()),
                  CapabilityError);
}

TEST_CASE("no internal reactions reduces to plain FBA") {
  MetabolicModel model = build_example_loop_model();
  model.internal_indices.clear();
  LooplessConfig config;
  for (auto f :
       {LooplessFormulation::BigM, LooplessFormulation::Indicator, LooplessFormulation::Hull}) {
    config.formulation = f;
    const FluxSolution sol =
        solve_llfba(model, config, solver::builtin_backend(), tight_settings());
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(40.0).epsilon(1e-9));
  }
}

TEST_CASE("acyclic internal matrix keeps the FBA optimum") {
  // Linear chain in -> A -> B -> out: no cycle, loopless changes nothing.
  MetabolicModel model;
  model.metabolite_ids = {"A", "B"};
  model.reaction_ids = {"in", "conv", "out"};
  std::vector<Eigen::Triplet<double>> entries = {
      {0, 0, 1.0}, {0, 1, -1.0}, {1, 1, 1.0}, {1, 2, -1.0}};
  model.stoichiometry.resize(2, 3);
  model.stoichiometry.setFromTriplets(entries.begin(), entries.end());
  model.lower_bounds = Vec::Zero(3);
  model.upper_bounds = Vec::Constant(3, 10.0);
  model.objective = Vec::Zero(3);
  model.objective[2] = 1.0;
  model.internal_indices = {1};
  model.validate();

  const double fba =
      solve_fba(model, solver::builtin_backend(), tight_settings()).objective_value;
  LooplessConfig config;
  for (auto f :
       {LooplessFormulation::BigM, LooplessFormulation::Indicator, LooplessFormulation::Hull}) {
    config.formulation = f;
    const FluxSolution sol =
        solve_llfba(model, config, solver::builtin_backend(), tight_settings());
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(fba).epsilon(1e-9));
  }
}

TEST_CASE("hull problem size matches the counting contract") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const MetabolicModel model = llfba::test::random_model(seed);
    const HullSize size = hull_problem_size(model);
    CHECK(size.variables ==
          model.num_reactions() + model.num_metabolites() + 7 * model.num_internal());
    CHECK(size.constraints == model.num_metabolites() + 10 * model.num_internal());
    LooplessConfig config;
    config.formulation = LooplessFormulation::Hull;
    const auto problem = build_llfba_problem(model, config, true);
    CHECK(static_cast<int>(problem.vars.size()) == size.variables);
    CHECK(static_cast<int>(problem.rows.size()) == size.constraints);
    CHECK(problem.indicators.empty());
  }
}

TEST_CASE("config validation") {
  const MetabolicModel model = build_example_loop_model();
  LooplessConfig config;
  SUBCASE("epsilon must exceed the feasibility tolerance") {
    config.epsilon = 1e-9;
    CHECK_THROWS_AS(config.validate(model, {}), ValidationError);
  }
  SUBCASE("big-M must cover the bounds") {
    config.big_m = 5.0;
    CHECK_THROWS_AS(config.validate(model, {}), ValidationError);
  }
  SUBCASE("big-M must exceed epsilon") {
    config.epsilon = 50.0;
    config.big_m = 40.0;
    CHECK_THROWS_AS(config.validate(model, {}), ValidationError);
  }
  SUBCASE("defaults are valid") {
    config.validate(model, {});
    CHECK(config.big_m_value(model) == doctest::Approx(30.0));
  }
}

TEST_CASE("formulations agree with the brute-force oracle on random models") {
  const auto settings = tight_settings();
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const MetabolicModel model = llfba::test::random_model(seed);
    const auto expected = llfba::test::oracle_llfba(model);
    REQUIRE(expected.status == llfba::test::OracleStatus::Optimal);
    LooplessConfig config;
    for (auto f : {LooplessFormulation::BigM, LooplessFormulation::Indicator,
                   LooplessFormulation::Hull}) {
      config.formulation = f;
      const FluxSolution sol = solve_llfba(model, config, solver::builtin_backend(), settings);
      INFO("seed ", seed, " formulation ", static_cast<int>(f));
      REQUIRE(sol.status == SolveStatus::Optimal);
      CHECK(sol.objective_value == doctest::Approx(expected.objective).epsilon(1e-6));
    }
  }
}

TEST_CASE("warm start does not change the optimum") {
  const MetabolicModel model = llfba::test::random_model(3);
  LooplessConfig with, without;
  without.warm_start = false;
  const double a =
      solve_llfba(model, with, solver::builtin_backend(), tight_settings()).objective_value;
  const double b =
      solve_llfba(model, without, solver::builtin_backend(), tight_settings()).objective_value;
  CHECK(a == doctest::Approx(b).epsilon(1e-9));
}
