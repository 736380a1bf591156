#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "llfba/errors.hpp"
#include "simplex.hpp"

namespace llfba::solver::detail {

namespace {

Clock::time_point deadline_from(const SolveSettings& s) {
  return Clock::now() + std::chrono::duration_cast<Clock::duration>(
                            std::chrono::duration<double>(s.time_limit_s));
}

Eigen::VectorXd objective_vector(const LinearProblem& p) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<int>(p.vars.size()));
  for (const auto& [j, v] : p.objective) c[j] += v;
  return c;
}

}  // namespace

DenseLp to_dense(const LinearProblem& p, const std::vector<const LinearConstraint*>& extra_rows,
                 const Eigen::VectorXd* lb_override, const Eigen::VectorXd* ub_override) {
  const int n = static_cast<int>(p.vars.size());
  const int m = static_cast<int>(p.rows.size() + extra_rows.size());
  DenseLp d;
  d.a = Eigen::MatrixXd::Zero(m, n);
  d.rhs = Eigen::VectorXd::Zero(m);
  d.sense.resize(m);
  int r = 0;
  auto fill_row = [&](const LinearConstraint& row) {
    for (const auto& [j, v] : row.coeffs) d.a(r, j) += v;
    d.sense[r] = row.sense;
    d.rhs[r] = row.rhs;
    ++r;
  };
  for (const auto& row : p.rows) fill_row(row);
  for (const auto* row : extra_rows) fill_row(*row);
  d.lb = Eigen::VectorXd(n);
  d.ub = Eigen::VectorXd(n);
  for (int j = 0; j < n; ++j) {
    d.lb[j] = lb_override ? (*lb_override)[j] : p.vars[j].lb;
    d.ub[j] = ub_override ? (*ub_override)[j] : p.vars[j].ub;
  }
  d.cost = objective_vector(p);
  d.maximize = p.sense == ObjSense::Maximize;
  return d;
}

SolveResult solve_lp_problem(const LinearProblem& p, const SolveSettings& settings) {
  SolveResult res;
  if (p.vars.empty() && p.rows.empty()) {
    res.status = SolveStatus::Optimal;
    res.objective = 0.0;
    res.has_duals = true;
    return res;
  }
  DenseLp d = to_dense(p, {}, nullptr, nullptr);
  LpOutcome out = solve_dense_lp(d, settings.feasibility_tol, deadline_from(settings));
  res.status = out.status;
  if (out.x.size() > 0 &&
      (out.status == SolveStatus::Optimal || out.status == SolveStatus::Unbounded)) {
    res.primal.assign(out.x.data(), out.x.data() + out.x.size());
    res.objective = out.objective;
  }
  if (out.status == SolveStatus::Optimal) {
    res.duals.assign(out.row_duals.data(), out.row_duals.data() + out.row_duals.size());
    res.has_duals = true;
  }
  return res;
}

SolveResult solve_mip(const LinearProblem& p, const SolveSettings& settings) {
  const auto deadline = deadline_from(settings);
  const int n = static_cast<int>(p.vars.size());
  const bool maximize = p.sense == ObjSense::Maximize;

  std::vector<int> binaries;
  for (int j = 0; j < n; ++j) {
    if (p.vars[j].kind == VarKind::Binary) binaries.push_back(j);
  }
  std::map<int, double> hints(p.branch_hints.begin(), p.branch_hints.end());

  struct Node {
    Eigen::VectorXd lb, ub;
  };
  Node root;
  root.lb = Eigen::VectorXd(n);
  root.ub = Eigen::VectorXd(n);
  for (int j = 0; j < n; ++j) {
    root.lb[j] = p.vars[j].lb;
    root.ub[j] = p.vars[j].ub;
  }

  std::vector<Node> stack;
  stack.push_back(std::move(root));

  bool have_incumbent = false;
  double inc_score = -kInf;  // internal: always maximize the score
  std::vector<double> inc_primal;
  bool timed_out = false;
  long nodes = 0;
  const long node_cap = 5'000'000;

  while (!stack.empty()) {
    if (Clock::now() > deadline) {
      timed_out = true;
      break;
    }
    if (++nodes > node_cap) {
      SolveResult res;
      res.status = SolveStatus::NumericalError;
      return res;
    }
    Node node = std::move(stack.back());
    stack.pop_back();

    std::vector<const LinearConstraint*> active;
    for (const auto& ind : p.indicators) {
      const int b = ind.binary_var;
      if (node.lb[b] == node.ub[b] &&
          static_cast<int>(std::lround(node.lb[b])) == ind.active_value) {
        active.push_back(&ind.implied);
      }
    }

    DenseLp d = to_dense(p, active, &node.lb, &node.ub);
    LpOutcome out = solve_dense_lp(d, settings.feasibility_tol, deadline);
    if (out.status == SolveStatus::Infeasible) continue;
    if (out.status == SolveStatus::TimeLimit) {
      timed_out = true;
      break;
    }
    if (out.status == SolveStatus::Unbounded) {
      SolveResult res;
      res.status = SolveStatus::Unbounded;
      return res;
    }
    if (out.status != SolveStatus::Optimal) {
      SolveResult res;
      res.status = SolveStatus::NumericalError;
      return res;
    }

    const double score = maximize ? out.objective : -out.objective;
    if (have_incumbent) {
      const double slack = settings.optimality_gap * std::max(1.0, std::fabs(inc_score));
      if (score <= inc_score + slack) continue;
    }

    // Branch on the most fractional binary, if any.
    int frac_var = -1;
    double frac_dist = settings.integrality_tol;
    for (int b : binaries) {
      const double val = out.x[b];
      const double dist = std::fabs(val - std::round(val));
      if (dist > frac_dist) {
        frac_dist = dist;
        frac_var = b;
      }
    }
    // Integral point: indicator constraints whose binary is on but whose row
    // is violated force a branch on that binary.
    if (frac_var < 0) {
      for (const auto& ind : p.indicators) {
        const int b = ind.binary_var;
        if (node.lb[b] == node.ub[b]) continue;  // row already enforced or off
        if (static_cast<int>(std::lround(out.x[b])) != ind.active_value) continue;
        double lhs = 0.0;
        for (const auto& [j, v] : ind.implied.coeffs) lhs += v * out.x[j];
        const double viol = ind.implied.sense == Sense::LessEqual ? lhs - ind.implied.rhs
                            : ind.implied.sense == Sense::GreaterEqual
                                ? ind.implied.rhs - lhs
                                : std::fabs(lhs - ind.implied.rhs);
        if (viol > settings.feasibility_tol) {
          frac_var = b;
          break;
        }
      }
    }

    if (frac_var < 0) {
      // Feasible integral point.
      if (!have_incumbent || score > inc_score) {
        have_incumbent = true;
        inc_score = score;
        inc_primal.assign(out.x.data(), out.x.data() + out.x.size());
      }
      continue;
    }

    double preferred;
    if (auto it = hints.find(frac_var); it != hints.end()) {
      preferred = std::round(it->second);
    } else {
      preferred = std::round(out.x[frac_var]);
    }
    preferred = std::clamp(preferred, 0.0, 1.0);

    Node lo = node, hi = node;
    lo.lb[frac_var] = 0.0;
    lo.ub[frac_var] = 0.0;
    hi.lb[frac_var] = 1.0;
    hi.ub[frac_var] = 1.0;
    // DFS: push the preferred child last so it is explored first.
    if (preferred >= 0.5) {
      stack.push_back(std::move(lo));
      stack.push_back(std::move(hi));
    } else {
      stack.push_back(std::move(hi));
      stack.push_back(std::move(lo));
    }
  }

  SolveResult res;
  if (timed_out) {
    res.status = SolveStatus::TimeLimit;
  } else if (have_incumbent) {
    res.status = SolveStatus::Optimal;
  } else {
    res.status = SolveStatus::Infeasible;
  }
  if (have_incumbent) {
    for (int b : binaries) inc_primal[b] = std::round(inc_primal[b]);
    res.primal = std::move(inc_primal);
    Eigen::VectorXd c = objective_vector(p);
    double obj = 0.0;
    for (int j = 0; j < n; ++j) obj += c[j] * res.primal[j];
    res.objective = obj;
  }
  return res;
}

}  // namespace llfba::solver::detail
