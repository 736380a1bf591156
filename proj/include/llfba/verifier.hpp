#pragma once

#include <vector>

#include "llfba/model.hpp"
#include "llfba/solver/backend.hpp"

namespace llfba::verifier {

struct VerifyResult {
  bool certified = false;
  Vec mu;                  // witness potentials when certified
  std::vector<int> cycle;  // minimal infeasible subsystem (model reaction
                           // indices) when a cycle was found
};

/// Independent thermodynamic-feasibility check of a steady-state flux vector.
/// Reactions with |v_i| <= tol are direction-free: their sign constraints are
/// dropped and feasibility of the relaxed potential system decides.
/// Throws ValidationError if ||S v||_inf > tol (not at steady state).
VerifyResult verify_loopless(const MetabolicModel& model, const Vec& v, double epsilon = 1.0,
                             double tol = 1e-6,
                             const solver::Backend& backend = solver::builtin_backend(),
                             const solver::SolveSettings& settings = {});

/// Alternative check through the nullspace of S_I: true iff no internal cycle
/// matches the flux signs on the support of v. Agrees with verify_loopless by
/// LP duality.
bool verify_via_nullspace(const MetabolicModel& model, const Vec& v, double tol = 1e-6,
                          const solver::Backend& backend = solver::builtin_backend(),
                          const solver::SolveSettings& settings = {});

}  // namespace llfba::verifier
