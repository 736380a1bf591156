#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "llfba/enzyme.hpp"
#include "llfba/model.hpp"
#include "llfba/solver/backend.hpp"

namespace llfba::benders {

/// Binary direction vector aligned with the model's internal_indices:
/// values[k] = 1 fixes the forward disjunct of internal reaction k.
struct DirectionAssignment {
  std::vector<int> values;

  bool operator==(const DirectionAssignment&) const = default;
};

struct InfeasibleSubsystem {
  std::vector<int> indices;          // model reaction indices, sorted subset of I
  std::vector<int> refuted_values;   // a|C: refuted direction per index
  std::vector<double> dual_weights;  // lambda support values, aligned with indices

  bool operator==(const InfeasibleSubsystem& other) const { return indices == other.indices; }
};

enum class MasterFormulation { BigM, Indicator, Both };
enum class CutStrategy { All, Distinct, KSmallest, DensityLimit };

std::string to_string(MasterFormulation f);
std::string to_string(CutStrategy s);

struct BendersConfig {
  MasterFormulation master_formulation = MasterFormulation::BigM;
  double cuts_per_iter_pct = 0.0;  // 0 => single cut per iteration
  CutStrategy cut_strategy = CutStrategy::Distinct;
  int k_smallest = 1;        // for KSmallest
  double density_limit = 1.0;  // for DensityLimit, in (0,1]
  bool no_good_only = false;
  double epsilon = 1.0;
  std::optional<double> big_m;  // defaults to max |bound|
  long max_iterations = 1'000'000;
  bool warm_start = true;
  // Re-solve the restricted subproblem per dropped index before emitting a
  // cut; guards against degenerate vertex supports. Off for large runs.
  bool recheck_minimality = true;
  // Observer for every emitted subsystem (used by the verification suites).
  std::function<void(const InfeasibleSubsystem&)> on_mis;

  void validate() const;
};

/// One CSV row per solve; the schema is
/// instance,method,formulation,pct,strategy,status,objective,iterations,cuts,wall_time_s
struct SolveReport {
  std::string instance;
  std::string method;
  std::string formulation;
  double pct = 0.0;
  std::string strategy;
  SolveStatus status = SolveStatus::NumericalError;
  double objective = 0.0;
  long iterations = 0;
  long cuts = 0;
  double wall_time_s = 0.0;
  double master_time_s = 0.0;
  double mis_time_s = 0.0;
  std::vector<double> master_objectives;  // per master solve, for diagnostics

  static std::string csv_header();
  std::string csv_row() const;
};

/// Master problem: FBA plus direction binaries linked to flux signs; the
/// thermodynamic constraints are left out. Variables 0..n-1 are the fluxes;
/// binary for internal position k is returned through binary_vars.
solver::LinearProblem build_master(const MetabolicModel& model, const BendersConfig& config,
                                   std::vector<int>* binary_vars = nullptr);

struct SubproblemResult {
  bool feasible = false;
  Vec mu;        // witness, length m (when feasible)
  Vec delta_mu;  // S_I^T mu, length |I|
};

/// Feasibility of the potential assignment: find mu with the signed delta-mu
/// constraints fixed by a.
SubproblemResult check_subproblem(const SparseMat& s_internal, const DirectionAssignment& a,
                                  double epsilon, const solver::Backend& backend,
                                  const solver::SolveSettings& settings);

/// Minimal infeasible subsystem from the dual LP over the signed constraint
/// rows; nullopt when the subproblem is actually feasible. internal_indices
/// maps row positions back to model reaction indices.
std::optional<InfeasibleSubsystem> find_mis(const SparseMat& s_internal,
                                            const DirectionAssignment& a, double epsilon,
                                            const std::vector<double>& weights,
                                            const std::vector<int>& internal_indices,
                                            const solver::Backend& backend,
                                            const solver::SolveSettings& settings,
                                            bool recheck_minimality = true);

/// Weight-variation scheme: uniform weights first, then one zeroed
/// coefficient per additional attempt, iterating over the leading constraint
/// rows; duplicates are removed by index-set equality.
std::vector<InfeasibleSubsystem> enumerate_mis(const SparseMat& s_internal,
                                               const DirectionAssignment& a, double epsilon,
                                               int max_count,
                                               const std::vector<int>& internal_indices,
                                               const solver::Backend& backend,
                                               const solver::SolveSettings& settings,
                                               bool recheck_minimality = true);

/// A cut over the direction binaries: sum of mismatches with the refuted
/// restriction must be >= 1.
struct AssignmentCut {
  std::vector<std::pair<int, int>> terms;  // (model reaction index, refuted value), sorted

  bool operator==(const AssignmentCut&) const = default;
};

AssignmentCut cb_cut(const InfeasibleSubsystem& mis);
AssignmentCut no_good_cut(const DirectionAssignment& a, const std::vector<int>& internal_indices);

std::vector<InfeasibleSubsystem> select_cuts(const std::vector<InfeasibleSubsystem>& pool,
                                             const BendersConfig& config, int total_internal);

struct BendersResult {
  FluxSolution solution;
  SolveReport report;
};

/// Algorithm: solve master, extract up to m MIS, add selected cuts, repeat;
/// on termination re-solve the subproblem for the certificate.
BendersResult solve_llfba_benders(const MetabolicModel& model, const BendersConfig& config,
                                  const solver::Backend& backend,
                                  const solver::SolveSettings& settings);

/// Enzyme-constrained variant: the master additionally carries enzyme usage
/// variables, mass-balance and capacity rows; the thermodynamic side uses the
/// split model's internal reactions.
BendersResult solve_llfba_benders(const enzyme::EnzymeModel& model, const BendersConfig& config,
                                  const solver::Backend& backend,
                                  const solver::SolveSettings& settings);

}  // namespace llfba::benders
