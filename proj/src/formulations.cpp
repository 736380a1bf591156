#include "llfba/formulations.hpp"

#include <algorithm>
#include <cmath>

#include "llfba/errors.hpp"

namespace llfba {

using solver::LinearProblem;
using solver::Sense;
using solver::SolveResult;

double LooplessConfig::big_m_value(const MetabolicModel& model) const {
  if (big_m) return *big_m;
  double m = 0.0;
  for (int j = 0; j < model.num_reactions(); ++j) {
    m = std::max(m, std::max(std::fabs(model.lower_bounds[j]), std::fabs(model.upper_bounds[j])));
  }
  return m;
}

void LooplessConfig::validate(const MetabolicModel& model,
                              const solver::SolveSettings& settings) const {
  if (epsilon <= settings.feasibility_tol) {
    throw ValidationError("epsilon must exceed the feasibility tolerance");
  }
  const double m = big_m_value(model);
  double max_bound = 0.0;
  for (int j = 0; j < model.num_reactions(); ++j) {
    max_bound =
        std::max(max_bound, std::max(std::fabs(model.lower_bounds[j]), std::fabs(model.upper_bounds[j])));
  }
  if (m < max_bound) throw ValidationError("big_M must cover the largest flux bound magnitude");
  if (m <= epsilon) throw ValidationError("big_M must exceed epsilon");
}

LinearProblem build_fba_problem(const MetabolicModel& model) {
  LinearProblem p;
  p.sense = solver::ObjSense::Maximize;
  for (int j = 0; j < model.num_reactions(); ++j) {
    p.add_continuous(model.reaction_ids[j], model.lower_bounds[j], model.upper_bounds[j]);
  }
  for (int i = 0; i < model.num_metabolites(); ++i) {
    p.add_row({}, Sense::Equal, 0.0, "mass_" + model.metabolite_ids[i]);
  }
  for (int j = 0; j < model.stoichiometry.outerSize(); ++j) {
    for (SparseMat::InnerIterator it(model.stoichiometry, j); it; ++it) {
      p.rows[it.row()].coeffs.emplace_back(j, it.value());
    }
  }
  for (int j = 0; j < model.num_reactions(); ++j) {
    if (model.objective[j] != 0.0) p.objective.emplace_back(j, model.objective[j]);
  }
  return p;
}

namespace {

FluxSolution from_result(const MetabolicModel& model, const SolveResult& res) {
  FluxSolution sol;
  sol.status = res.status;
  if (!res.primal.empty()) {
    sol.v = Vec::Zero(model.num_reactions());
    for (int j = 0; j < model.num_reactions(); ++j) sol.v[j] = res.primal[j];
    double obj = 0.0;
    for (int j = 0; j < model.num_reactions(); ++j) obj += model.objective[j] * sol.v[j];
    sol.objective_value = obj;
  }
  return sol;
}

void attach_certificate(const MetabolicModel& model, const SolveResult& res, int mu_start,
                        int dmu_start, FluxSolution& sol) {
  if (res.primal.empty()) return;
  Vec mu = Vec::Zero(model.num_metabolites());
  for (int i = 0; i < model.num_metabolites(); ++i) mu[i] = res.primal[mu_start + i];
  Vec dmu = Vec::Zero(model.num_internal());
  for (int k = 0; k < model.num_internal(); ++k) dmu[k] = res.primal[dmu_start + k];
  sol.mu = mu;
  sol.delta_mu = dmu;
}

void add_warm_start(LinearProblem& p, const MetabolicModel& model,
                    const std::vector<int>& binary_vars, const solver::Backend& backend,
                    const solver::SolveSettings& settings) {
  try {
    SolveResult fba = backend.solve(build_fba_problem(model), settings);
    if (fba.status != SolveStatus::Optimal) return;
    for (int k = 0; k < model.num_internal(); ++k) {
      const double v = fba.primal[model.internal_indices[k]];
      p.branch_hints.emplace_back(binary_vars[k], v >= 0.0 ? 1.0 : 0.0);
    }
  } catch (const Error&) {
    // warm start is best-effort only
  }
}

}  // namespace

FluxSolution solve_fba(const MetabolicModel& model, const solver::Backend& backend,
                       const solver::SolveSettings& settings) {
  model.validate();
  return from_result(model, backend.solve(build_fba_problem(model), settings));
}

LinearProblem build_llfba_problem(const MetabolicModel& model, const LooplessConfig& config,
                                  bool backend_supports_indicators) {
  const int n = model.num_reactions();
  const int m = model.num_metabolites();
  const int ni = model.num_internal();
  const double eps = config.epsilon;
  const double big_m = config.big_m_value(model);

  LinearProblem p = build_fba_problem(model);

  // Potentials and per-internal-reaction energy differences.
  std::vector<int> mu_vars(m), dmu_vars(ni);
  for (int i = 0; i < m; ++i) {
    mu_vars[i] = p.add_continuous("mu_" + model.metabolite_ids[i], -solver::kInf, solver::kInf);
  }
  for (int k = 0; k < ni; ++k) {
    dmu_vars[k] = p.add_continuous("dmu_" + model.reaction_ids[model.internal_indices[k]], -big_m,
                                   big_m);
  }
  // delta_mu = S_I^T mu
  for (int k = 0; k < ni; ++k) {
    std::vector<std::pair<int, double>> row{{dmu_vars[k], 1.0}};
    const int col = model.internal_indices[k];
    for (SparseMat::InnerIterator it(model.stoichiometry, col); it; ++it) {
      row.emplace_back(mu_vars[it.row()], -it.value());
    }
    p.add_row(std::move(row), Sense::Equal, 0.0, "kirchhoff_" + std::to_string(k));
  }

  const bool use_indicators =
      config.formulation == LooplessFormulation::Indicator && backend_supports_indicators;

  if (config.formulation == LooplessFormulation::Hull) {
    for (int k = 0; k < ni; ++k) {
      const int i = model.internal_indices[k];
      const std::string tag = model.reaction_ids[i];
      const int y1 = p.add_binary("y_fwd_" + tag);
      const int y2 = p.add_binary("y_bwd_" + tag);
      const int v1 = p.add_continuous("v1_" + tag, 0.0, solver::kInf);
      const int v2 = p.add_continuous("v2_" + tag, -solver::kInf, 0.0);
      const int d1 = p.add_continuous("dmu1_" + tag, -solver::kInf, solver::kInf);
      const int d2 = p.add_continuous("dmu2_" + tag, -solver::kInf, solver::kInf);
      p.add_row({{y1, 1.0}, {y2, 1.0}}, Sense::Equal, 1.0);
      p.add_row({{i, 1.0}, {v1, -1.0}, {v2, -1.0}}, Sense::Equal, 0.0);
      p.add_row({{dmu_vars[k], 1.0}, {d1, -1.0}, {d2, -1.0}}, Sense::Equal, 0.0);
      p.add_row({{v1, 1.0}, {y1, -model.upper_bounds[i]}}, Sense::LessEqual, 0.0);
      p.add_row({{v2, 1.0}, {y2, -model.lower_bounds[i]}}, Sense::GreaterEqual, 0.0);
      p.add_row({{d1, 1.0}, {y1, eps}}, Sense::LessEqual, 0.0);
      p.add_row({{d1, 1.0}, {y1, big_m}}, Sense::GreaterEqual, 0.0);
      p.add_row({{d2, 1.0}, {y2, -eps}}, Sense::GreaterEqual, 0.0);
      p.add_row({{d2, 1.0}, {y2, -big_m}}, Sense::LessEqual, 0.0);
    }
    return p;
  }

  for (int k = 0; k < ni; ++k) {
    const int i = model.internal_indices[k];
    const int a = p.add_binary("a_" + model.reaction_ids[i]);
    if (use_indicators) {
      p.add_indicator(a, 1, {{i, 1.0}}, Sense::GreaterEqual, 0.0);
      p.add_indicator(a, 1, {{dmu_vars[k], 1.0}}, Sense::LessEqual, -eps);
      p.add_indicator(a, 0, {{i, 1.0}}, Sense::LessEqual, 0.0);
      p.add_indicator(a, 0, {{dmu_vars[k], 1.0}}, Sense::GreaterEqual, eps);
    } else {
      // -M a + eps (1-a) <= dmu <= -eps a + M (1-a)
      p.add_row({{dmu_vars[k], 1.0}, {a, big_m + eps}}, Sense::LessEqual, big_m);
      p.add_row({{dmu_vars[k], 1.0}, {a, big_m + eps}}, Sense::GreaterEqual, eps);
      // -M (1-a) <= v <= M a
      p.add_row({{i, 1.0}, {a, -big_m}}, Sense::LessEqual, 0.0);
      p.add_row({{i, 1.0}, {a, -big_m}}, Sense::GreaterEqual, -big_m);
    }
  }
  return p;
}

namespace {

FluxSolution solve_loopless(const MetabolicModel& model, LooplessConfig config,
                            const solver::Backend& backend,
                            const solver::SolveSettings& settings) {
  model.validate();
  config.validate(model, settings);
  if (model.num_internal() == 0) return solve_fba(model, backend, settings);

  if (config.formulation == LooplessFormulation::Indicator && !backend.supports_indicators() &&
      !config.allow_indicator_fallback) {
    throw CapabilityError("indicator formulation requested on backend '" + backend.name() +
                          "' with fallback disabled");
  }

  LinearProblem p = build_llfba_problem(model, config, backend.supports_indicators());
  if (config.warm_start) {
    std::vector<int> binaries;
    for (int j = 0; j < static_cast<int>(p.vars.size()); ++j) {
      if (p.vars[j].kind == solver::VarKind::Binary) binaries.push_back(j);
    }
    if (config.formulation == LooplessFormulation::Hull) {
      // binaries come in (y_fwd, y_bwd) pairs
      try {
        SolveResult fba = backend.solve(build_fba_problem(model), settings);
        if (fba.status == SolveStatus::Optimal) {
          for (int k = 0; k < model.num_internal(); ++k) {
            const double v = fba.primal[model.internal_indices[k]];
            p.branch_hints.emplace_back(binaries[2 * k], v >= 0.0 ? 1.0 : 0.0);
            p.branch_hints.emplace_back(binaries[2 * k + 1], v >= 0.0 ? 0.0 : 1.0);
          }
        }
      } catch (const Error&) {
      }
    } else {
      add_warm_start(p, model, binaries, backend, settings);
    }
  }

  SolveResult res = backend.solve(p, settings);
  FluxSolution sol = from_result(model, res);
  attach_certificate(model, res, model.num_reactions(),
                     model.num_reactions() + model.num_metabolites(), sol);
  return sol;
}

}  // namespace

FluxSolution solve_llfba_bigm(const MetabolicModel& model, const LooplessConfig& config,
                              const solver::Backend& backend,
                              const solver::SolveSettings& settings) {
  LooplessConfig c = config;
  c.formulation = LooplessFormulation::BigM;
  return solve_loopless(model, c, backend, settings);
}

FluxSolution solve_llfba_indicator(const MetabolicModel& model, const LooplessConfig& config,
                                   const solver::Backend& backend,
                                   const solver::SolveSettings& settings) {
  LooplessConfig c = config;
  c.formulation = LooplessFormulation::Indicator;
  return solve_loopless(model, c, backend, settings);
}

FluxSolution solve_llfba_hull(const MetabolicModel& model, const LooplessConfig& config,
                              const solver::Backend& backend,
                              const solver::SolveSettings& settings) {
  LooplessConfig c = config;
  c.formulation = LooplessFormulation::Hull;
  return solve_loopless(model, c, backend, settings);
}

FluxSolution solve_llfba(const MetabolicModel& model, const LooplessConfig& config,
                         const solver::Backend& backend, const solver::SolveSettings& settings) {
  return solve_loopless(model, config, backend, settings);
}

HullSize hull_problem_size(const MetabolicModel& model) {
  const int n = model.num_reactions();
  const int m = model.num_metabolites();
  const int ni = model.num_internal();
  return {n + m + ni + 4 * ni + 2 * ni, m + 10 * ni};
}

void append_enzyme_rows(solver::LinearProblem& problem, const enzyme::EnzymeModel& model,
                        std::vector<int>* enzyme_vars) {
  const int p_count = model.num_enzymes();
  std::vector<int> evars(p_count);
  for (int i = 0; i < p_count; ++i) {
    evars[i] = problem.add_continuous("e_" + model.enzyme_ids[i], 0.0, model.enzyme_capacity[i]);
  }
  // one mass-balance row per enzyme: e_i - sum_j v_j / kcat_ij = 0
  std::vector<std::vector<std::pair<int, double>>> rows(p_count);
  for (int i = 0; i < p_count; ++i) rows[i].emplace_back(evars[i], 1.0);
  for (const auto& coupling : model.couplings) {
    rows[coupling.enzyme].emplace_back(coupling.reaction, -1.0 / coupling.kcat);
  }
  for (int i = 0; i < p_count; ++i) {
    problem.add_row(std::move(rows[i]), Sense::Equal, 0.0, "enzyme_" + model.enzyme_ids[i]);
  }
  for (const auto& group : model.groups) {
    std::vector<std::pair<int, double>> row;
    for (const auto& [enzyme, mass] : group.members) row.emplace_back(evars[enzyme], mass);
    problem.add_row(std::move(row), Sense::LessEqual, group.capacity, "mass_group_" + group.name);
  }
  if (enzyme_vars != nullptr) *enzyme_vars = std::move(evars);
}

EnzymeFluxSolution solve_enzyme_fba(const enzyme::EnzymeModel& model,
                                    const solver::Backend& backend,
                                    const solver::SolveSettings& settings) {
  model.base.validate();
  LinearProblem p = build_fba_problem(model.base);
  std::vector<int> evars;
  append_enzyme_rows(p, model, &evars);
  SolveResult res = backend.solve(p, settings);
  EnzymeFluxSolution out;
  out.flux = from_result(model.base, res);
  if (!res.primal.empty()) {
    out.enzyme_usage = Vec::Zero(model.num_enzymes());
    for (int i = 0; i < model.num_enzymes(); ++i) out.enzyme_usage[i] = res.primal[evars[i]];
  }
  return out;
}

}  // namespace llfba
