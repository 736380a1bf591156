#pragma once

// Internal dense LP engine behind the Backend contract. Bounded-variable
// two-phase revised simplex with an explicit basis inverse, periodic
// refactorization and a Bland fallback against cycling.

#include <Eigen/Dense>
#include <chrono>
#include <vector>

#include "llfba/model.hpp"
#include "llfba/solver/problem.hpp"

namespace llfba::solver::detail {

using Clock = std::chrono::steady_clock;

struct DenseLp {
  Eigen::MatrixXd a;  // rows x n
  std::vector<Sense> sense;
  Eigen::VectorXd rhs;
  Eigen::VectorXd lb, ub;  // length n
  Eigen::VectorXd cost;    // length n, in the original sense
  bool maximize = true;
};

struct LpOutcome {
  SolveStatus status = SolveStatus::NumericalError;
  Eigen::VectorXd x;  // structural values, valid if a feasible point was found
  double objective = 0.0;
  Eigen::VectorXd row_duals;  // valid iff status == Optimal
};

LpOutcome solve_dense_lp(const DenseLp& lp, double feas_tol, Clock::time_point deadline);

DenseLp to_dense(const LinearProblem& p, const std::vector<const LinearConstraint*>& extra_rows,
                 const Eigen::VectorXd* lb_override, const Eigen::VectorXd* ub_override);

SolveResult solve_lp_problem(const LinearProblem& p, const SolveSettings& settings);
SolveResult solve_mip(const LinearProblem& p, const SolveSettings& settings);

}  // namespace llfba::solver::detail
