#include "llfba/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "llfba/errors.hpp"
#include "llfba/solver/problem.hpp"

namespace llfba::verifier {

using solver::LinearProblem;
using solver::Sense;
using solver::SolveResult;

namespace {

void require_steady_state(const MetabolicModel& model, const Vec& v, double tol) {
  if (v.size() != model.num_reactions()) {
    throw ValidationError("flux vector length does not match reaction count");
  }
  const Vec residual = model.stoichiometry * v;
  if (residual.lpNorm<Eigen::Infinity>() > tol) {
    throw ValidationError("flux vector is not at steady state, ||Sv|| = " +
                          std::to_string(residual.lpNorm<Eigen::Infinity>()));
  }
}

}  // namespace

VerifyResult verify_loopless(const MetabolicModel& model, const Vec& v, double epsilon,
                             double tol, const solver::Backend& backend,
                             const solver::SolveSettings& settings) {
  model.validate();
  require_steady_state(model, v, tol);
  const SparseMat s_internal = internal_submatrix(model);
  const int m = model.num_metabolites();

  // Potentials must exist with Delta mu opposing every carried internal flux;
  // zero-flux reactions impose nothing.
  std::vector<int> forced;  // internal positions with |v| above tol
  for (int k = 0; k < model.num_internal(); ++k) {
    if (std::fabs(v[model.internal_indices[k]]) > tol) forced.push_back(k);
  }

  VerifyResult result;
  if (forced.empty()) {
    result.certified = true;
    result.mu = Vec::Zero(m);
    return result;
  }

  LinearProblem p;
  for (int i = 0; i < m; ++i) {
    p.add_continuous("mu_" + std::to_string(i), -solver::kInf, solver::kInf);
  }
  for (int k : forced) {
    std::vector<std::pair<int, double>> row;
    for (SparseMat::InnerIterator it(s_internal, k); it; ++it) {
      row.emplace_back(static_cast<int>(it.row()), it.value());
    }
    if (v[model.internal_indices[k]] > 0.0) {
      p.add_row(std::move(row), Sense::LessEqual, -epsilon);
    } else {
      p.add_row(std::move(row), Sense::GreaterEqual, epsilon);
    }
  }

  SolveResult res = backend.solve(p, settings);
  if (res.status == SolveStatus::Optimal) {
    result.certified = true;
    result.mu = Vec::Zero(m);
    for (int i = 0; i < m; ++i) result.mu[i] = res.primal[i];
    return result;
  }
  if (res.status != SolveStatus::Infeasible) {
    throw BackendError("potential feasibility check failed: " + to_string(res.status));
  }

  // Extract one minimal infeasible row set by a deletion filter over the
  // forced constraints.
  auto subset_feasible = [&](const std::vector<int>& subset) {
    LinearProblem q;
    for (int i = 0; i < m; ++i) {
      q.add_continuous("mu_" + std::to_string(i), -solver::kInf, solver::kInf);
    }
    for (int k : subset) {
      std::vector<std::pair<int, double>> row;
      for (SparseMat::InnerIterator it(s_internal, k); it; ++it) {
        row.emplace_back(static_cast<int>(it.row()), it.value());
      }
      if (v[model.internal_indices[k]] > 0.0) {
        q.add_row(std::move(row), Sense::LessEqual, -epsilon);
      } else {
        q.add_row(std::move(row), Sense::GreaterEqual, epsilon);
      }
    }
    SolveResult r = backend.solve(q, settings);
    if (r.status == SolveStatus::Optimal) return true;
    if (r.status == SolveStatus::Infeasible) return false;
    throw BackendError("potential feasibility check failed: " + to_string(r.status));
  };

  std::vector<int> core = forced;
  for (size_t pos = 0; pos < core.size();) {
    std::vector<int> trial;
    trial.reserve(core.size() - 1);
    for (size_t q = 0; q < core.size(); ++q) {
      if (q != pos) trial.push_back(core[q]);
    }
    if (!subset_feasible(trial)) {
      core = std::move(trial);
    } else {
      ++pos;
    }
  }
  for (int k : core) result.cycle.push_back(model.internal_indices[k]);
  result.certified = false;
  return result;
}

bool verify_via_nullspace(const MetabolicModel& model, const Vec& v, double tol,
                          const solver::Backend& backend,
                          const solver::SolveSettings& settings) {
  model.validate();
  require_steady_state(model, v, tol);
  const SparseMat s_internal = internal_submatrix(model);
  const Mat basis = nullspace_basis(s_internal);
  const int ni = model.num_internal();
  const int dim = static_cast<int>(basis.cols());
  if (dim == 0) return true;

  // Search for a cycle ell = B z in the nullspace whose signs match v on the
  // support and vanish elsewhere; nontriviality is enforced by pushing the
  // signed sum of supported entries to at least 1.
  LinearProblem p;
  for (int j = 0; j < dim; ++j) {
    p.add_continuous("z_" + std::to_string(j), -solver::kInf, solver::kInf);
  }
  std::vector<std::pair<int, double>> nontrivial;
  bool any_support = false;
  for (int k = 0; k < ni; ++k) {
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < dim; ++j) {
      if (basis(k, j) != 0.0) row.emplace_back(j, basis(k, j));
    }
    const double vk = v[model.internal_indices[k]];
    if (std::fabs(vk) <= tol) {
      p.add_row(std::move(row), Sense::Equal, 0.0);
    } else {
      any_support = true;
      const double sign = vk > 0.0 ? 1.0 : -1.0;
      for (const auto& [j, coef] : row) {
        auto found = std::find_if(nontrivial.begin(), nontrivial.end(),
                                  [j = j](const auto& t) { return t.first == j; });
        if (found == nontrivial.end()) {
          nontrivial.emplace_back(j, sign * coef);
        } else {
          found->second += sign * coef;
        }
      }
      if (vk > 0.0) {
        p.add_row(std::move(row), Sense::GreaterEqual, 0.0);
      } else {
        p.add_row(std::move(row), Sense::LessEqual, 0.0);
      }
    }
  }
  if (!any_support) return true;
  p.add_row(std::move(nontrivial), Sense::GreaterEqual, 1.0);

  SolveResult res = backend.solve(p, settings);
  if (res.status == SolveStatus::Optimal) return false;  // a matching cycle exists
  if (res.status == SolveStatus::Infeasible) return true;
  throw BackendError("nullspace cycle search failed: " + to_string(res.status));
}

}  // namespace llfba::verifier
