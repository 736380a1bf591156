#include "llfba/solver/backend.hpp"

#include <cmath>
#include <cstdlib>
#include <ostream>
#include <string>

#include "llfba/errors.hpp"
#include "simplex.hpp"

namespace llfba::solver {

void LinearProblem::validate() const {
  const int n = static_cast<int>(vars.size());
  auto check_row = [&](const LinearConstraint& row) {
    for (const auto& [j, v] : row.coeffs) {
      (void)v;
      if (j < 0 || j >= n) throw ValidationError("constraint references undeclared variable");
    }
  };
  for (const auto& row : rows) check_row(row);
  for (const auto& ind : indicators) {
    if (ind.binary_var < 0 || ind.binary_var >= n) {
      throw ValidationError("indicator references undeclared binary");
    }
    if (vars[ind.binary_var].kind != VarKind::Binary) {
      throw ValidationError("indicator attached to a non-binary variable");
    }
    if (ind.active_value != 0 && ind.active_value != 1) {
      throw ValidationError("indicator active value must be 0 or 1");
    }
    check_row(ind.implied);
  }
  for (const auto& var : vars) {
    if (var.kind == VarKind::Binary) {
      const bool lb_ok = var.lb == 0.0 || var.lb == 1.0;
      const bool ub_ok = var.ub == 0.0 || var.ub == 1.0;
      if (!lb_ok || !ub_ok || var.lb > var.ub) {
        throw ValidationError("binary variable bounds must be within {0,1}");
      }
    }
  }
  for (const auto& [j, v] : objective) {
    (void)v;
    if (j < 0 || j >= n) throw ValidationError("objective references undeclared variable");
  }
}

namespace {

class BuiltinBackend final : public Backend {
 public:
  explicit BuiltinBackend(bool indicators) : indicators_(indicators) {}

  SolveResult solve(const LinearProblem& problem, const SolveSettings& settings) const override {
    problem.validate();
    if (!problem.indicators.empty() && !indicators_) {
      throw CapabilityError("backend '" + name() + "' does not support indicator constraints");
    }
    if (settings.feasibility_tol <= 0 || settings.integrality_tol <= 0 ||
        settings.optimality_gap <= 0) {
      throw BackendError("solver tolerances must be positive");
    }
    if (problem.is_mip()) return detail::solve_mip(problem, settings);
    return detail::solve_lp_problem(problem, settings);
  }

  bool supports_indicators() const override { return indicators_; }
  std::string name() const override { return indicators_ ? "builtin" : "builtin-bigm"; }

 private:
  bool indicators_;
};

}  // namespace

const Backend& builtin_backend() {
  static BuiltinBackend backend(true);
  return backend;
}

const Backend& bigm_only_backend() {
  static BuiltinBackend backend(false);
  return backend;
}

const Backend& default_backend() {
  const char* env = std::getenv("LLFBA_BACKEND");
  if (env != nullptr && std::string(env) == "builtin-bigm") return bigm_only_backend();
  return builtin_backend();
}

namespace {

void write_terms(std::ostream& out, const std::vector<std::pair<int, double>>& coeffs,
                 const LinearProblem& p) {
  bool first = true;
  for (const auto& [j, v] : coeffs) {
    if (v == 0.0) continue;
    if (first) {
      if (v < 0) out << "- ";
      first = false;
    } else {
      out << (v < 0 ? " - " : " + ");
    }
    const double av = std::fabs(v);
    if (av != 1.0) out << av << " ";
    out << p.vars[j].name;
  }
  if (first) out << "0 " << (p.vars.empty() ? "x" : p.vars[0].name);
}

void write_constraint(std::ostream& out, const LinearConstraint& row, const LinearProblem& p) {
  write_terms(out, row.coeffs, p);
  switch (row.sense) {
    case Sense::LessEqual:
      out << " <= ";
      break;
    case Sense::Equal:
      out << " = ";
      break;
    case Sense::GreaterEqual:
      out << " >= ";
      break;
  }
  out << row.rhs;
}

}  // namespace

void write_lp_format(const LinearProblem& p, std::ostream& out) {
  out << (p.sense == ObjSense::Maximize ? "Maximize" : "Minimize") << "\n obj: ";
  write_terms(out, p.objective, p);
  out << "\nSubject To\n";
  int idx = 0;
  for (const auto& row : p.rows) {
    out << " " << (row.name.empty() ? "c" + std::to_string(idx) : row.name) << ": ";
    write_constraint(out, row, p);
    out << "\n";
    ++idx;
  }
  for (const auto& ind : p.indicators) {
    out << " i" << idx << ": " << p.vars[ind.binary_var].name << " = " << ind.active_value
        << " -> ";
    write_constraint(out, ind.implied, p);
    out << "\n";
    ++idx;
  }
  out << "Bounds\n";
  for (const auto& var : p.vars) {
    if (var.kind == VarKind::Binary) continue;
    if (var.lb == -kInf && var.ub == kInf) {
      out << " " << var.name << " free\n";
    } else {
      out << " ";
      if (var.lb == -kInf) {
        out << "-inf";
      } else {
        out << var.lb;
      }
      out << " <= " << var.name << " <= ";
      if (var.ub == kInf) {
        out << "+inf";
      } else {
        out << var.ub;
      }
      out << "\n";
    }
  }
  bool any_binary = false;
  for (const auto& var : p.vars) {
    if (var.kind == VarKind::Binary) {
      if (!any_binary) {
        out << "Binary\n";
        any_binary = true;
      }
      out << " " << var.name << "\n";
    }
  }
  out << "End\n";
}

}  // namespace llfba::solver
