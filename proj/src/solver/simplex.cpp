#include "simplex.hpp"

#include <Eigen/LU>
#include <cmath>
#include <limits>

namespace llfba::solver::detail {

namespace {

enum class VStat { Basic, AtLower, AtUpper, NonbasicFree };

constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;

// Working state for one phase of the bounded-variable simplex over the
// augmented system [A | I_slack | I_artificial] x = rhs.
struct Core {
  int m = 0;
  int total = 0;
  Eigen::MatrixXd cols;  // m x total
  Eigen::VectorXd lb, ub, x, rhs;
  std::vector<int> basis;     // size m
  std::vector<VStat> stat;    // size total
  Eigen::MatrixXd binv;       // m x m
  Clock::time_point deadline;

  enum class RunResult { Optimal, Unbounded, IterationLimit, Singular, TimeLimit };

  bool refresh() {
    if (m == 0) return true;
    Eigen::MatrixXd b(m, m);
    for (int i = 0; i < m; ++i) b.col(i) = cols.col(basis[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
    // PartialPivLU has no rank query; probe via the determinant magnitude.
    if (!std::isfinite(lu.determinant()) || lu.determinant() == 0.0) return false;
    binv = lu.inverse();
    // Recompute basic values from the nonbasic point.
    Eigen::VectorXd xn = x;
    for (int i = 0; i < m; ++i) xn[basis[i]] = 0.0;
    Eigen::VectorXd r = rhs - cols * xn;
    Eigen::VectorXd xb = binv * r;
    for (int i = 0; i < m; ++i) x[basis[i]] = xb[i];
    return true;
  }

  RunResult run(const Eigen::VectorXd& cost) {
    bool bland = false;
    long iter = 0;
    long stall = 0;
    const long max_iter = 20000 + 200L * total;
    if (!refresh()) return RunResult::Singular;
    while (true) {
      if ((iter & 127) == 0 && Clock::now() > deadline) return RunResult::TimeLimit;
      if (iter > max_iter) return RunResult::IterationLimit;
      if (iter > 0 && (iter & 255) == 0 && !refresh()) return RunResult::Singular;

      Eigen::VectorXd cb(m);
      for (int i = 0; i < m; ++i) cb[i] = cost[basis[i]];
      Eigen::VectorXd y = m > 0 ? Eigen::VectorXd(binv.transpose() * cb) : Eigen::VectorXd(0);

      int enter = -1;
      int dir = 0;
      double best = kDualTol;
      double enter_rc = 0.0;
      for (int j = 0; j < total; ++j) {
        if (stat[j] == VStat::Basic) continue;
        if (lb[j] == ub[j]) continue;  // fixed
        double d = cost[j] - (m > 0 ? y.dot(cols.col(j)) : 0.0);
        int cand_dir = 0;
        if ((stat[j] == VStat::AtLower || stat[j] == VStat::NonbasicFree) && d < -kDualTol) {
          cand_dir = 1;
        } else if ((stat[j] == VStat::AtUpper || stat[j] == VStat::NonbasicFree) && d > kDualTol) {
          cand_dir = -1;
        }
        if (cand_dir == 0) continue;
        if (bland) {
          enter = j;
          dir = cand_dir;
          enter_rc = d;
          break;
        }
        if (std::fabs(d) > best) {
          best = std::fabs(d);
          enter = j;
          dir = cand_dir;
          enter_rc = d;
        }
      }
      if (enter < 0) return RunResult::Optimal;

      Eigen::VectorXd w =
          m > 0 ? Eigen::VectorXd(binv * cols.col(enter)) : Eigen::VectorXd(0);

      double t_max = ub[enter] - lb[enter];  // bound flip distance (may be inf)
      int leave = -1;
      bool leave_to_upper = false;
      for (int i = 0; i < m; ++i) {
        const int bi = basis[i];
        const double di = dir * w[i];
        double t = std::numeric_limits<double>::infinity();
        bool to_upper = false;
        if (di > kPivotTol) {
          if (lb[bi] == -kInf) continue;
          t = (x[bi] - lb[bi]) / di;
        } else if (di < -kPivotTol) {
          if (ub[bi] == kInf) continue;
          t = (ub[bi] - x[bi]) / (-di);
          to_upper = true;
        } else {
          continue;
        }
        if (t < 0.0) t = 0.0;
        if (t < t_max - 1e-12 ||
            (t <= t_max + 1e-12 && leave >= 0 && basis[i] < basis[leave])) {
          t_max = t;
          leave = i;
          leave_to_upper = to_upper;
        } else if (t <= t_max + 1e-12 && leave < 0 && t <= t_max) {
          t_max = t;
          leave = i;
          leave_to_upper = to_upper;
        }
      }
      if (std::isinf(t_max)) return RunResult::Unbounded;

      const double improvement = enter_rc * dir * t_max;  // <= 0 for progress
      if (improvement > -1e-12) {
        if (++stall > 500) bland = true;
      } else {
        stall = 0;
      }

      for (int i = 0; i < m; ++i) x[basis[i]] -= t_max * dir * w[i];
      x[enter] += dir * t_max;

      if (leave < 0) {
        // Entering variable traversed its whole range: bound flip.
        stat[enter] = dir > 0 ? VStat::AtUpper : VStat::AtLower;
        x[enter] = dir > 0 ? ub[enter] : lb[enter];
      } else {
        const int lv = basis[leave];
        stat[lv] = leave_to_upper ? VStat::AtUpper : VStat::AtLower;
        x[lv] = leave_to_upper ? ub[lv] : lb[lv];
        basis[leave] = enter;
        stat[enter] = VStat::Basic;
        const double wr = w[leave];
        if (std::fabs(wr) < kPivotTol) return RunResult::Singular;
        binv.row(leave) /= wr;
        for (int i = 0; i < m; ++i) {
          if (i == leave) continue;
          binv.row(i) -= w[i] * binv.row(leave);
        }
      }
      ++iter;
    }
  }
};

}  // namespace

LpOutcome solve_dense_lp(const DenseLp& lp, double feas_tol, Clock::time_point deadline) {
  const int n = static_cast<int>(lp.a.cols());
  const int m = static_cast<int>(lp.a.rows());
  LpOutcome out;

  for (int j = 0; j < n; ++j) {
    if (lp.lb[j] > lp.ub[j] + feas_tol) {
      out.status = SolveStatus::Infeasible;
      return out;
    }
  }

  Core core;
  core.m = m;
  core.total = n + 2 * m;
  core.deadline = deadline;
  core.cols = Eigen::MatrixXd::Zero(m, core.total);
  core.cols.leftCols(n) = lp.a;
  for (int i = 0; i < m; ++i) {
    core.cols(i, n + i) = 1.0;          // slack
    core.cols(i, n + m + i) = 1.0;      // artificial
  }
  core.lb = Eigen::VectorXd::Constant(core.total, -kInf);
  core.ub = Eigen::VectorXd::Constant(core.total, kInf);
  core.x = Eigen::VectorXd::Zero(core.total);
  core.rhs = lp.rhs;
  core.stat.assign(core.total, VStat::AtLower);
  core.basis.resize(m);

  for (int j = 0; j < n; ++j) {
    double l = std::min(lp.lb[j], lp.ub[j]);
    double u = lp.ub[j];
    core.lb[j] = l;
    core.ub[j] = u;
    if (l == -kInf && u == kInf) {
      core.stat[j] = VStat::NonbasicFree;
      core.x[j] = 0.0;
    } else if (l == -kInf) {
      core.stat[j] = VStat::AtUpper;
      core.x[j] = u;
    } else if (u == kInf) {
      core.stat[j] = VStat::AtLower;
      core.x[j] = l;
    } else {
      // bounded both sides: start at the bound closest to zero
      if (std::fabs(l) <= std::fabs(u)) {
        core.stat[j] = VStat::AtLower;
        core.x[j] = l;
      } else {
        core.stat[j] = VStat::AtUpper;
        core.x[j] = u;
      }
    }
  }
  for (int i = 0; i < m; ++i) {
    const int sj = n + i;
    switch (lp.sense[i]) {
      case Sense::LessEqual:
        core.lb[sj] = 0.0;
        break;
      case Sense::Equal:
        core.lb[sj] = 0.0;
        core.ub[sj] = 0.0;
        break;
      case Sense::GreaterEqual:
        core.ub[sj] = 0.0;
        core.stat[sj] = VStat::AtUpper;
        break;
    }
    core.x[sj] = 0.0;
  }

  // Artificial start: one basic artificial per row absorbing the residual.
  Eigen::VectorXd cost1 = Eigen::VectorXd::Zero(core.total);
  {
    Eigen::VectorXd r = lp.rhs - core.cols.leftCols(n + m) * core.x.head(n + m);
    for (int i = 0; i < m; ++i) {
      const int aj = n + m + i;
      if (r[i] >= 0.0) {
        core.lb[aj] = 0.0;
        cost1[aj] = 1.0;
      } else {
        core.ub[aj] = 0.0;
        cost1[aj] = -1.0;
      }
      core.x[aj] = r[i];
      core.basis[i] = aj;
      core.stat[aj] = VStat::Basic;
    }
    core.binv = Eigen::MatrixXd::Identity(m, m);
  }

  auto map_failure = [&](Core::RunResult rr) {
    switch (rr) {
      case Core::RunResult::TimeLimit:
        return SolveStatus::TimeLimit;
      default:
        return SolveStatus::NumericalError;
    }
  };

  Core::RunResult rr = core.run(cost1);
  if (rr != Core::RunResult::Optimal && rr != Core::RunResult::Unbounded) {
    out.status = map_failure(rr);
    return out;
  }
  double infeas = 0.0;
  for (int i = 0; i < m; ++i) infeas += std::fabs(core.x[n + m + i]);
  if (infeas > feas_tol) {
    out.status = SolveStatus::Infeasible;
    return out;
  }
  // Pin artificials at zero for phase 2.
  for (int i = 0; i < m; ++i) {
    const int aj = n + m + i;
    core.lb[aj] = 0.0;
    core.ub[aj] = 0.0;
    if (core.stat[aj] != VStat::Basic) {
      core.stat[aj] = VStat::AtLower;
      core.x[aj] = 0.0;
    }
  }

  Eigen::VectorXd cost2 = Eigen::VectorXd::Zero(core.total);
  cost2.head(n) = lp.maximize ? Eigen::VectorXd(-lp.cost) : lp.cost;

  rr = core.run(cost2);
  if (rr == Core::RunResult::Unbounded) {
    out.status = SolveStatus::Unbounded;
    out.x = core.x.head(n);
    return out;
  }
  if (rr != Core::RunResult::Optimal) {
    out.status = map_failure(rr);
    return out;
  }
  out.status = SolveStatus::Optimal;
  out.x = core.x.head(n);
  out.objective = lp.cost.dot(out.x);
  if (m > 0) {
    Eigen::VectorXd cb(m);
    for (int i = 0; i < m; ++i) cb[i] = cost2[core.basis[i]];
    Eigen::VectorXd y = core.binv.transpose() * cb;
    out.row_duals = lp.maximize ? Eigen::VectorXd(-y) : y;
  } else {
    out.row_duals = Eigen::VectorXd(0);
  }
  return out;
}

}  // namespace llfba::solver::detail
