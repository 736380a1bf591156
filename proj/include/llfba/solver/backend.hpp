#pragma once

#include <iosfwd>
#include <string>

#include "llfba/solver/problem.hpp"

namespace llfba::solver {

/// Contract to an LP/MIP engine. Every formulation builds problems only
/// through this interface so engines can be swapped behind it.
class Backend {
 public:
  virtual ~Backend() = default;

  /// Statuses follow SolveStatus. Primal values are returned iff a feasible
  /// point was found; duals iff the problem is a pure LP solved to optimality.
  /// Throws CapabilityError if the problem carries indicator constraints and
  /// supports_indicators() is false.
  virtual SolveResult solve(const LinearProblem& problem, const SolveSettings& settings) const = 0;

  virtual bool supports_indicators() const = 0;
  virtual std::string name() const = 0;
};

/// Built-in dense simplex + branch-and-bound engine. Handles indicator
/// constraints natively (enforced on branches where the binary is fixed).
/// Deterministic: identical problem, settings and seed yield identical
/// status and objective.
const Backend& builtin_backend();

/// Same engine with the indicator capability flag off; sending indicator
/// constraints raises CapabilityError. Exists to exercise the documented
/// big-M fallback path.
const Backend& bigm_only_backend();

/// Selected by the LLFBA_BACKEND environment variable ("builtin" or
/// "builtin-bigm"); defaults to builtin.
const Backend& default_backend();

/// Human-readable LP-format dump for debugging; engine-neutral.
void write_lp_format(const LinearProblem& problem, std::ostream& out);

}  // namespace llfba::solver
