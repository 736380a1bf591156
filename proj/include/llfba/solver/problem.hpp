#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "llfba/model.hpp"

namespace llfba::solver {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };
enum class Sense { LessEqual, Equal, GreaterEqual };
enum class ObjSense { Minimize, Maximize };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lb = -kInf;
  double ub = kInf;
};

struct LinearConstraint {
  std::vector<std::pair<int, double>> coeffs;  // (variable index, coefficient)
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  std::string name;
};

/// binary_var = active_value  implies  the linear constraint holds.
struct IndicatorConstraint {
  int binary_var = -1;
  int active_value = 1;
  LinearConstraint implied;
};

struct LinearProblem {
  std::vector<Variable> vars;
  std::vector<LinearConstraint> rows;
  std::vector<IndicatorConstraint> indicators;
  std::vector<std::pair<int, double>> objective;
  ObjSense sense = ObjSense::Maximize;
  // Optional preferred branching values for binaries, e.g. from an FBA warm
  // start. Purely a search hint; never affects the feasible set.
  std::vector<std::pair<int, double>> branch_hints;

  int add_var(std::string name, VarKind kind, double lb, double ub) {
    vars.push_back({std::move(name), kind, lb, ub});
    return static_cast<int>(vars.size()) - 1;
  }
  int add_continuous(std::string name, double lb, double ub) {
    return add_var(std::move(name), VarKind::Continuous, lb, ub);
  }
  int add_binary(std::string name) { return add_var(std::move(name), VarKind::Binary, 0.0, 1.0); }

  void add_row(std::vector<std::pair<int, double>> coeffs, Sense sense, double rhs,
               std::string name = {}) {
    rows.push_back({std::move(coeffs), sense, rhs, std::move(name)});
  }
  void add_indicator(int binary_var, int active_value, std::vector<std::pair<int, double>> coeffs,
                     Sense sense, double rhs, std::string name = {}) {
    indicators.push_back(
        {binary_var, active_value, {std::move(coeffs), sense, rhs, std::move(name)}});
  }

  bool is_mip() const {
    if (!indicators.empty()) return true;
    for (const auto& v : vars) {
      if (v.kind == VarKind::Binary) return true;
    }
    return false;
  }

  /// Throws ValidationError on dangling variable references or non-{0,1}
  /// binary bounds.
  void validate() const;
};

struct SolveSettings {
  double time_limit_s = 1800.0;
  double feasibility_tol = 1e-6;
  double integrality_tol = 1e-6;
  double optimality_gap = 1e-6;  // relative
  std::uint64_t seed = 0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::NumericalError;
  std::vector<double> primal;  // empty unless a feasible point was found
  double objective = 0.0;
  std::vector<double> duals;  // per row; only for pure LPs solved to optimality
  bool has_duals = false;
};

}  // namespace llfba::solver
