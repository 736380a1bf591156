#pragma once

#include <optional>

#include "llfba/enzyme.hpp"
#include "llfba/model.hpp"
#include "llfba/solver/backend.hpp"

namespace llfba {

enum class LooplessFormulation { BigM, Indicator, Hull };

struct LooplessConfig {
  double epsilon = 1.0;
  // Defaults to max |bound| over all reactions when unset.
  std::optional<double> big_m;
  LooplessFormulation formulation = LooplessFormulation::BigM;
  // When the backend lacks indicator support, the indicator formulation
  // linearizes with the same big-M; set false to get CapabilityError instead.
  bool allow_indicator_fallback = true;
  // Seed binary branching from FBA flux signs.
  bool warm_start = true;

  double big_m_value(const MetabolicModel& model) const;
  /// epsilon > feasibility tolerance, big_M >= max |bound|, big_M > epsilon.
  void validate(const MetabolicModel& model, const solver::SolveSettings& settings) const;
};

solver::LinearProblem build_fba_problem(const MetabolicModel& model);

FluxSolution solve_fba(const MetabolicModel& model, const solver::Backend& backend,
                       const solver::SolveSettings& settings);

FluxSolution solve_llfba_bigm(const MetabolicModel& model, const LooplessConfig& config,
                              const solver::Backend& backend,
                              const solver::SolveSettings& settings);

FluxSolution solve_llfba_indicator(const MetabolicModel& model, const LooplessConfig& config,
                                   const solver::Backend& backend,
                                   const solver::SolveSettings& settings);

FluxSolution solve_llfba_hull(const MetabolicModel& model, const LooplessConfig& config,
                              const solver::Backend& backend,
                              const solver::SolveSettings& settings);

/// Dispatch on config.formulation.
FluxSolution solve_llfba(const MetabolicModel& model, const LooplessConfig& config,
                         const solver::Backend& backend, const solver::SolveSettings& settings);

/// Closed-form size of the hull MIP: n + m + |I| base variables plus 4|I|
/// split continuous and 2|I| binaries; m + 10|I| linear constraints.
struct HullSize {
  int variables = 0;
  int constraints = 0;
};
HullSize hull_problem_size(const MetabolicModel& model);

/// Exposed for tests and LP dumps; backend_supports_indicators selects
/// between native indicators and the big-M linearization for the Indicator
/// formulation.
solver::LinearProblem build_llfba_problem(const MetabolicModel& model,
                                          const LooplessConfig& config,
                                          bool backend_supports_indicators);

struct EnzymeFluxSolution {
  FluxSolution flux;      // over the split model's reactions
  Vec enzyme_usage;       // length p, valid when a feasible point was found
};

/// ENZ program: max c'v s.t. S v = 0, mass-balance rows, bounds, capacities.
EnzymeFluxSolution solve_enzyme_fba(const enzyme::EnzymeModel& model,
                                    const solver::Backend& backend,
                                    const solver::SolveSettings& settings);

/// Shared helper: appends enzyme usage variables, mass-balance rows and mass
/// group capacity rows to a problem whose first n variables are the split
/// model's fluxes.
void append_enzyme_rows(solver::LinearProblem& problem, const enzyme::EnzymeModel& model,
                        std::vector<int>* enzyme_vars);

}  // namespace llfba
