#include "llfba/benders.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

#include "llfba/errors.hpp"
#include "llfba/formulations.hpp"

namespace llfba::benders {

using solver::LinearProblem;
using solver::Sense;
using solver::SolveResult;

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kSupportTol = 1e-7;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double max_abs_bound(const MetabolicModel& model) {
  double m = 0.0;
  for (int j = 0; j < model.num_reactions(); ++j) {
    m = std::max(m, std::max(std::fabs(model.lower_bounds[j]), std::fabs(model.upper_bounds[j])));
  }
  return m;
}

/// Signed constraint rows of the subproblem restricted to the given internal
/// positions; empty subset means all rows.
LinearProblem subproblem_lp(const SparseMat& s_internal, const DirectionAssignment& a,
                            double epsilon, const std::vector<int>* subset) {
  const int m = static_cast<int>(s_internal.rows());
  LinearProblem p;
  for (int i = 0; i < m; ++i) {
    p.add_continuous("mu_" + std::to_string(i), -solver::kInf, solver::kInf);
  }
  auto add_signed_row = [&](int k) {
    std::vector<std::pair<int, double>> row;
    for (SparseMat::InnerIterator it(s_internal, k); it; ++it) {
      row.emplace_back(static_cast<int>(it.row()), it.value());
    }
    if (a.values[k] == 1) {
      p.add_row(std::move(row), Sense::LessEqual, -epsilon);
    } else {
      p.add_row(std::move(row), Sense::GreaterEqual, epsilon);
    }
  };
  if (subset != nullptr) {
    for (int k : *subset) add_signed_row(k);
  } else {
    for (int k = 0; k < static_cast<int>(s_internal.cols()); ++k) add_signed_row(k);
  }
  return p;
}

bool restricted_infeasible(const SparseMat& s_internal, const DirectionAssignment& a,
                           double epsilon, const std::vector<int>& subset,
                           const solver::Backend& backend,
                           const solver::SolveSettings& settings) {
  LinearProblem p = subproblem_lp(s_internal, a, epsilon, &subset);
  SolveResult res = backend.solve(p, settings);
  if (res.status == SolveStatus::Infeasible) return true;
  if (res.status == SolveStatus::Optimal) return false;
  throw BackendError("subproblem feasibility check failed: " + to_string(res.status));
}

}  // namespace

std::string to_string(MasterFormulation f) {
  switch (f) {
    case MasterFormulation::BigM:
      return "bigm";
    case MasterFormulation::Indicator:
      return "indicator";
    case MasterFormulation::Both:
      return "both";
  }
  return "bigm";
}

std::string to_string(CutStrategy s) {
  switch (s) {
    case CutStrategy::All:
      return "all";
    case CutStrategy::Distinct:
      return "distinct";
    case CutStrategy::KSmallest:
      return "ksmallest";
    case CutStrategy::DensityLimit:
      return "density";
  }
  return "distinct";
}

void BendersConfig::validate() const {
  if (cuts_per_iter_pct < 0.0 || cuts_per_iter_pct > 100.0) {
    throw ValidationError("cuts_per_iter_pct must be within [0, 100]");
  }
  if (cut_strategy == CutStrategy::DensityLimit &&
      (density_limit <= 0.0 || density_limit > 1.0)) {
    throw ValidationError("density_limit must be in (0, 1]");
  }
  if (cut_strategy == CutStrategy::KSmallest && k_smallest < 1) {
    throw ValidationError("k_smallest must be >= 1");
  }
  if (epsilon <= 0.0) throw ValidationError("epsilon must be positive");
}

LinearProblem build_master(const MetabolicModel& model, const BendersConfig& config,
                           std::vector<int>* binary_vars) {
  const double big_m = config.big_m.value_or(max_abs_bound(model));
  LinearProblem p = build_fba_problem(model);
  std::vector<int> binaries;
  for (int k = 0; k < model.num_internal(); ++k) {
    const int i = model.internal_indices[k];
    const int a = p.add_binary("a_" + model.reaction_ids[i]);
    binaries.push_back(a);
    const bool want_bigm = config.master_formulation == MasterFormulation::BigM ||
                           config.master_formulation == MasterFormulation::Both;
    const bool want_indicator = config.master_formulation == MasterFormulation::Indicator ||
                                config.master_formulation == MasterFormulation::Both;
    if (want_bigm) {
      // -M (1-a) <= v <= M a
      p.add_row({{i, 1.0}, {a, -big_m}}, Sense::LessEqual, 0.0);
      p.add_row({{i, 1.0}, {a, -big_m}}, Sense::GreaterEqual, -big_m);
    }
    if (want_indicator) {
      p.add_indicator(a, 1, {{i, 1.0}}, Sense::GreaterEqual, 0.0);
      p.add_indicator(a, 0, {{i, 1.0}}, Sense::LessEqual, 0.0);
    }
  }
  if (binary_vars != nullptr) *binary_vars = std::move(binaries);
  return p;
}

SubproblemResult check_subproblem(const SparseMat& s_internal, const DirectionAssignment& a,
                                  double epsilon, const solver::Backend& backend,
                                  const solver::SolveSettings& settings) {
  if (static_cast<int>(a.values.size()) != s_internal.cols()) {
    throw ValidationError("assignment length does not match internal reaction count");
  }
  LinearProblem p = subproblem_lp(s_internal, a, epsilon, nullptr);
  SolveResult res = backend.solve(p, settings);
  SubproblemResult out;
  if (res.status == SolveStatus::Infeasible) {
    out.feasible = false;
    return out;
  }
  if (res.status != SolveStatus::Optimal) {
    throw BackendError("subproblem solve failed: " + to_string(res.status));
  }
  out.feasible = true;
  out.mu = Vec::Zero(s_internal.rows());
  for (int i = 0; i < s_internal.rows(); ++i) out.mu[i] = res.primal[i];
  out.delta_mu = s_internal.transpose() * out.mu;
  return out;
}

std::optional<InfeasibleSubsystem> find_mis(const SparseMat& s_internal,
                                            const DirectionAssignment& a, double epsilon,
                                            const std::vector<double>& weights,
                                            const std::vector<int>& internal_indices,
                                            const solver::Backend& backend,
                                            const solver::SolveSettings& settings,
                                            bool recheck_minimality) {
  const int ni = static_cast<int>(s_internal.cols());
  const int m = static_cast<int>(s_internal.rows());
  if (static_cast<int>(weights.size()) != ni || static_cast<int>(a.values.size()) != ni ||
      static_cast<int>(internal_indices.size()) != ni) {
    throw ValidationError("find_mis input lengths disagree");
  }

  // Dual of the signed subproblem rows A~ mu <= -eps 1: a nonzero lambda >= 0
  // with A~^T lambda = 0 certifies infeasibility; normalizing b~^T lambda to a
  // negative constant makes every vertex support a minimal subsystem.
  LinearProblem p;
  for (int k = 0; k < ni; ++k) {
    p.add_continuous("lambda_" + std::to_string(k), 0.0, solver::kInf);
  }
  std::vector<std::vector<std::pair<int, double>>> balance(m);
  for (int k = 0; k < ni; ++k) {
    const double sigma = a.values[k] == 1 ? 1.0 : -1.0;
    for (SparseMat::InnerIterator it(s_internal, k); it; ++it) {
      balance[it.row()].emplace_back(k, sigma * it.value());
    }
  }
  for (int i = 0; i < m; ++i) {
    if (!balance[i].empty()) p.add_row(std::move(balance[i]), Sense::Equal, 0.0);
  }
  {
    std::vector<std::pair<int, double>> norm;
    for (int k = 0; k < ni; ++k) norm.emplace_back(k, -epsilon);
    p.add_row(std::move(norm), Sense::Equal, -1.0);
  }
  for (int k = 0; k < ni; ++k) {
    if (weights[k] != 0.0) p.objective.emplace_back(k, weights[k]);
  }
  p.sense = solver::ObjSense::Maximize;

  SolveResult res = backend.solve(p, settings);
  if (res.status == SolveStatus::Infeasible) return std::nullopt;  // subproblem was feasible
  if (res.status != SolveStatus::Optimal) {
    throw BackendError("MIS LP failed: " + to_string(res.status));
  }

  std::vector<int> support;
  for (int k = 0; k < ni; ++k) {
    if (res.primal[k] > kSupportTol) support.push_back(k);
  }
  if (support.empty()) throw BackendError("MIS LP returned an empty support");

  if (recheck_minimality) {
    if (!restricted_infeasible(s_internal, a, epsilon, support, backend, settings)) {
      throw BackendError("MIS support is not an infeasible subsystem");
    }
    // Deletion filter: drop every index whose removal keeps the subsystem
    // infeasible, so degenerate vertex supports still yield a minimal set.
    for (size_t pos = 0; pos < support.size();) {
      if (support.size() == 1) break;
      std::vector<int> trial;
      trial.reserve(support.size() - 1);
      for (size_t q = 0; q < support.size(); ++q) {
        if (q != pos) trial.push_back(support[q]);
      }
      if (restricted_infeasible(s_internal, a, epsilon, trial, backend, settings)) {
        support = std::move(trial);
      } else {
        ++pos;
      }
    }
  }

  InfeasibleSubsystem mis;
  for (int k : support) {
    mis.indices.push_back(internal_indices[k]);
    mis.refuted_values.push_back(a.values[k]);
    mis.dual_weights.push_back(res.primal[k]);
  }
  return mis;
}

std::vector<InfeasibleSubsystem> enumerate_mis(const SparseMat& s_internal,
                                               const DirectionAssignment& a, double epsilon,
                                               int max_count,
                                               const std::vector<int>& internal_indices,
                                               const solver::Backend& backend,
                                               const solver::SolveSettings& settings,
                                               bool recheck_minimality) {
  if (max_count < 1) throw ValidationError("max_count must be >= 1");
  const int ni = static_cast<int>(s_internal.cols());
  std::vector<InfeasibleSubsystem> found;
  std::set<std::vector<int>> seen;

  auto attempt = [&](const std::vector<double>& weights) {
    auto mis = find_mis(s_internal, a, epsilon, weights, internal_indices, backend, settings,
                        recheck_minimality);
    if (!mis) return false;
    if (seen.insert(mis->indices).second) found.push_back(std::move(*mis));
    return true;
  };

  std::vector<double> weights(ni, 1.0);
  if (!attempt(weights)) return found;  // subproblem feasible
  for (int t = 0; t < max_count - 1 && t < ni; ++t) {
    std::vector<double> varied(ni, 1.0);
    varied[t] = 0.0;
    attempt(varied);
  }
  return found;
}

AssignmentCut cb_cut(const InfeasibleSubsystem& mis) {
  AssignmentCut cut;
  for (size_t i = 0; i < mis.indices.size(); ++i) {
    cut.terms.emplace_back(mis.indices[i], mis.refuted_values[i]);
  }
  std::sort(cut.terms.begin(), cut.terms.end());
  return cut;
}

AssignmentCut no_good_cut(const DirectionAssignment& a, const std::vector<int>& internal_indices) {
  AssignmentCut cut;
  for (size_t k = 0; k < internal_indices.size(); ++k) {
    cut.terms.emplace_back(internal_indices[k], a.values[k]);
  }
  std::sort(cut.terms.begin(), cut.terms.end());
  return cut;
}

std::vector<InfeasibleSubsystem> select_cuts(const std::vector<InfeasibleSubsystem>& pool,
                                             const BendersConfig& config, int total_internal) {
  if (pool.empty()) return {};
  auto dedupe = [](const std::vector<InfeasibleSubsystem>& in) {
    std::vector<InfeasibleSubsystem> out;
    std::set<std::vector<int>> seen;
    for (const auto& mis : in) {
      if (seen.insert(mis.indices).second) out.push_back(mis);
    }
    return out;
  };
  auto by_size = [](const InfeasibleSubsystem& lhs, const InfeasibleSubsystem& rhs) {
    if (lhs.indices.size() != rhs.indices.size()) {
      return lhs.indices.size() < rhs.indices.size();
    }
    return lhs.indices < rhs.indices;
  };
  switch (config.cut_strategy) {
    case CutStrategy::All:
      return pool;
    case CutStrategy::Distinct:
      return dedupe(pool);
    case CutStrategy::KSmallest: {
      auto sorted = dedupe(pool);
      std::sort(sorted.begin(), sorted.end(), by_size);
      if (static_cast<int>(sorted.size()) > config.k_smallest) {
        sorted.resize(config.k_smallest);
      }
      return sorted;
    }
    case CutStrategy::DensityLimit: {
      auto unique = dedupe(pool);
      std::vector<InfeasibleSubsystem> kept;
      for (const auto& mis : unique) {
        const double density =
            total_internal > 0
                ? static_cast<double>(mis.indices.size()) / static_cast<double>(total_internal)
                : 1.0;
        if (density <= config.density_limit) kept.push_back(mis);
      }
      if (kept.empty()) {
        kept.push_back(*std::min_element(unique.begin(), unique.end(), by_size));
      }
      return kept;
    }
  }
  return pool;
}

std::string SolveReport::csv_header() {
  return "instance,method,formulation,pct,strategy,status,objective,iterations,cuts,wall_time_s";
}

std::string SolveReport::csv_row() const {
  std::ostringstream out;
  out.precision(12);
  out << instance << ',' << method << ',' << formulation << ',' << pct << ',' << strategy << ','
      << llfba::to_string(status) << ',' << objective << ',' << iterations << ',' << cuts << ','
      << wall_time_s;
  return out.str();
}

namespace {

void append_assignment_cut(LinearProblem& master, const AssignmentCut& cut,
                           const std::vector<int>& internal_indices,
                           const std::vector<int>& binary_vars) {
  std::vector<std::pair<int, double>> row;
  double rhs = 1.0;
  for (const auto& [reaction, refuted] : cut.terms) {
    const auto it =
        std::lower_bound(internal_indices.begin(), internal_indices.end(), reaction);
    const int k = static_cast<int>(it - internal_indices.begin());
    if (refuted == 0) {
      row.emplace_back(binary_vars[k], 1.0);
    } else {
      row.emplace_back(binary_vars[k], -1.0);
      rhs -= 1.0;
    }
  }
  master.add_row(std::move(row), Sense::GreaterEqual, rhs, "cut");
}

struct MasterContext {
  LinearProblem master;
  std::vector<int> binary_vars;
  SparseMat s_internal;
  std::vector<int> internal_indices;
  Vec flux_objective;        // over the flux variables 0..n-1
  double fba_objective = 0;  // LP relaxation reference
  int cuts_base_n = 0;       // n used for the pct -> cut-count rule
  std::vector<int> preferred;  // direction preference per internal position
};

// Beyond this many binaries the lexicographic weights vanish into rounding
// noise and the tie-break MIP gets expensive, so it is skipped.
constexpr int kTieBreakLimit = 32;

/// Among the master optima, pick the assignment that agrees with the
/// preferred directions in lexicographic order. This makes the visited
/// assignment a deterministic function of the surviving assignment set, so
/// adding more cuts per iteration can only skip ahead, never detour.
bool lexicographic_assignment(const MasterContext& ctx, double master_objective,
                              const solver::Backend& backend,
                              const solver::SolveSettings& settings,
                              DirectionAssignment* assignment) {
  const int ni = static_cast<int>(ctx.binary_vars.size());
  if (ni == 0 || ni > kTieBreakLimit) return false;
  LinearProblem tie = ctx.master;
  const double tol = 1e-9 * std::max(1.0, std::fabs(master_objective));
  std::vector<std::pair<int, double>> objective_row = tie.objective;
  tie.add_row(std::move(objective_row), Sense::GreaterEqual, master_objective - tol);
  tie.objective.clear();
  double weight = 0.5;
  for (int k = 0; k < ni; ++k) {
    tie.objective.emplace_back(ctx.binary_vars[k],
                               ctx.preferred[k] == 1 ? weight : -weight);
    weight *= 0.5;
  }
  SolveResult res = backend.solve(tie, settings);
  if (res.status != SolveStatus::Optimal) return false;
  for (int k = 0; k < ni; ++k) {
    assignment->values[k] = static_cast<int>(std::lround(res.primal[ctx.binary_vars[k]]));
  }
  return true;
}

BendersResult run_loop(MasterContext ctx, const BendersConfig& config,
                       const solver::Backend& backend, const solver::SolveSettings& settings) {
  config.validate();
  const auto start = Clock::now();
  const int ni = static_cast<int>(ctx.internal_indices.size());
  const int n_flux = static_cast<int>(ctx.flux_objective.size());

  BendersResult result;
  SolveReport& report = result.report;
  report.method = config.no_good_only ? "nogood" : "benders";
  report.formulation = to_string(config.master_formulation);
  report.pct = config.cuts_per_iter_pct;
  report.strategy = config.no_good_only ? "nogood" : to_string(config.cut_strategy);

  const int max_cuts_per_iter =
      config.cuts_per_iter_pct == 0.0
          ? 1
          : static_cast<int>(std::ceil(config.cuts_per_iter_pct / 100.0 * ctx.cuts_base_n));

  auto finish = [&](SolveStatus status) {
    report.status = status;
    result.solution.status = status;
    report.wall_time_s = seconds_since(start);
  };

  auto remaining_settings = [&]() {
    solver::SolveSettings s = settings;
    s.time_limit_s = settings.time_limit_s - seconds_since(start);
    return s;
  };

  DirectionAssignment assignment;
  assignment.values.assign(ni, 0);
  Vec master_v;

  while (true) {
    if (seconds_since(start) > settings.time_limit_s || report.iterations >= config.max_iterations) {
      finish(SolveStatus::TimeLimit);
      return result;
    }
    ++report.iterations;

    const auto master_start = Clock::now();
    SolveResult res = backend.solve(ctx.master, remaining_settings());
    report.master_time_s += seconds_since(master_start);

    if (res.status == SolveStatus::TimeLimit) {
      finish(SolveStatus::TimeLimit);
      return result;
    }
    if (res.status == SolveStatus::Infeasible) {
      finish(SolveStatus::Infeasible);
      return result;
    }
    if (res.status != SolveStatus::Optimal) {
      finish(SolveStatus::NumericalError);
      return result;
    }
    report.master_objectives.push_back(res.objective);
    if (report.iterations == 1 && std::fabs(res.objective - ctx.fba_objective) > 1e-3) {
      // First master must reproduce the FBA optimum: the direction links relax
      // to the FBA polytope, so a gap here flags numerical trouble.
      finish(SolveStatus::NumericalError);
      return result;
    }

    master_v = Vec::Zero(n_flux);
    for (int j = 0; j < n_flux; ++j) master_v[j] = res.primal[j];
    for (int k = 0; k < ni; ++k) {
      assignment.values[k] = static_cast<int>(std::lround(res.primal[ctx.binary_vars[k]]));
    }
    {
      const auto tie_start = Clock::now();
      lexicographic_assignment(ctx, res.objective, backend, remaining_settings(), &assignment);
      report.master_time_s += seconds_since(tie_start);
    }

    const auto mis_start = Clock::now();
    bool feasible;
    if (config.no_good_only) {
      feasible = check_subproblem(ctx.s_internal, assignment, config.epsilon, backend,
                                  remaining_settings())
                     .feasible;
      if (!feasible) {
        append_assignment_cut(ctx.master, no_good_cut(assignment, ctx.internal_indices),
                              ctx.internal_indices, ctx.binary_vars);
        ++report.cuts;
      }
    } else {
      auto pool = enumerate_mis(ctx.s_internal, assignment, config.epsilon, max_cuts_per_iter,
                                ctx.internal_indices, backend, remaining_settings(),
                                config.recheck_minimality);
      feasible = pool.empty();
      if (!feasible) {
        if (config.on_mis) {
          for (const auto& mis : pool) config.on_mis(mis);
        }
        const auto selected = select_cuts(pool, config, ni);
        for (const auto& mis : selected) {
          append_assignment_cut(ctx.master, cb_cut(mis), ctx.internal_indices, ctx.binary_vars);
        }
        report.cuts += static_cast<long>(selected.size());
      }
    }
    report.mis_time_s += seconds_since(mis_start);

    if (feasible) break;
  }

  // The tie-break may have moved off the first master optimum: recover the
  // best flux vector for the accepted assignment by fixing the binaries.
  {
    LinearProblem fixed = ctx.master;
    for (int k = 0; k < ni; ++k) {
      fixed.vars[ctx.binary_vars[k]].lb = assignment.values[k];
      fixed.vars[ctx.binary_vars[k]].ub = assignment.values[k];
    }
    SolveResult res = backend.solve(fixed, remaining_settings());
    if (res.status != SolveStatus::Optimal) {
      finish(res.status == SolveStatus::TimeLimit ? SolveStatus::TimeLimit
                                                  : SolveStatus::NumericalError);
      return result;
    }
    for (int j = 0; j < n_flux; ++j) master_v[j] = res.primal[j];
  }

  // Certificate: solve the subproblem once more for (delta_mu, mu).
  SubproblemResult sp =
      check_subproblem(ctx.s_internal, assignment, config.epsilon, backend, remaining_settings());
  if (!sp.feasible) {
    finish(SolveStatus::NumericalError);
    return result;
  }
  result.solution.v = master_v;
  result.solution.objective_value = ctx.flux_objective.dot(master_v);
  result.solution.mu = sp.mu;
  result.solution.delta_mu = sp.delta_mu;
  finish(SolveStatus::Optimal);
  report.objective = result.solution.objective_value;
  return result;
}

void set_direction_preference(MasterContext& ctx, const Vec& fba_v, bool warm_start) {
  ctx.preferred.assign(ctx.internal_indices.size(), 1);
  for (size_t k = 0; k < ctx.internal_indices.size(); ++k) {
    const double v = fba_v[ctx.internal_indices[k]];
    ctx.preferred[k] = v >= 0.0 ? 1 : 0;
    if (warm_start) {
      ctx.master.branch_hints.emplace_back(ctx.binary_vars[k], ctx.preferred[k]);
    }
  }
}

}  // namespace

BendersResult solve_llfba_benders(const MetabolicModel& model, const BendersConfig& config,
                                  const solver::Backend& backend,
                                  const solver::SolveSettings& settings) {
  model.validate();
  MasterContext ctx;
  ctx.master = build_master(model, config, &ctx.binary_vars);
  ctx.s_internal = internal_submatrix(model);
  ctx.internal_indices = model.internal_indices;
  ctx.flux_objective = model.objective;
  ctx.cuts_base_n = model.num_reactions();

  SolveResult fba = backend.solve(build_fba_problem(model), settings);
  if (fba.status != SolveStatus::Optimal) {
    BendersResult result;
    result.solution.status = fba.status;
    result.report.status = fba.status;
    result.report.method = config.no_good_only ? "nogood" : "benders";
    result.report.formulation = to_string(config.master_formulation);
    return result;
  }
  ctx.fba_objective = fba.objective;
  {
    Vec v = Vec::Zero(model.num_reactions());
    for (int j = 0; j < model.num_reactions(); ++j) v[j] = fba.primal[j];
    set_direction_preference(ctx, v, config.warm_start);
  }
  return run_loop(std::move(ctx), config, backend, settings);
}

BendersResult solve_llfba_benders(const enzyme::EnzymeModel& model, const BendersConfig& config,
                                  const solver::Backend& backend,
                                  const solver::SolveSettings& settings) {
  model.base.validate();
  MasterContext ctx;
  ctx.master = build_master(model.base, config, &ctx.binary_vars);
  append_enzyme_rows(ctx.master, model, nullptr);
  ctx.s_internal = internal_submatrix(model.base);
  ctx.internal_indices = model.base.internal_indices;
  ctx.flux_objective = model.base.objective;
  ctx.cuts_base_n = model.base.num_reactions();

  // ENZ LP reference for the first-iteration objective check.
  LinearProblem enz_lp = build_fba_problem(model.base);
  append_enzyme_rows(enz_lp, model, nullptr);
  SolveResult enz = backend.solve(enz_lp, settings);
  if (enz.status != SolveStatus::Optimal) {
    BendersResult result;
    result.solution.status = enz.status;
    result.report.status = enz.status;
    result.report.method = config.no_good_only ? "nogood" : "benders";
    result.report.formulation = to_string(config.master_formulation);
    return result;
  }
  ctx.fba_objective = enz.objective;
  {
    Vec v = Vec::Zero(model.base.num_reactions());
    for (int j = 0; j < model.base.num_reactions(); ++j) v[j] = enz.primal[j];
    set_direction_preference(ctx, v, config.warm_start);
  }
  return run_loop(std::move(ctx), config, backend, settings);
}

}  // namespace llfba::benders
