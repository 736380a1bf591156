#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <string>
#include <vector>

namespace llfba {

enum class SolveStatus { Optimal, Infeasible, Unbounded, TimeLimit, NumericalError };

std::string to_string(SolveStatus status);
std::optional<SolveStatus> parse_status(const std::string& text);

using SparseMat = Eigen::SparseMatrix<double>;  // compressed-column storage
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Constraint-based metabolic model. Immutable after construction; all
/// operations treat it as read-only, so instances can be shared across threads.
struct MetabolicModel {
  std::vector<std::string> metabolite_ids;
  std::vector<std::string> reaction_ids;
  SparseMat stoichiometry;  // m x n
  Vec lower_bounds;         // length n, mmol/gDW/h
  Vec upper_bounds;         // length n
  Vec objective;            // length n
  std::vector<int> internal_indices;  // sorted, unique, 0-based column indices

  int num_metabolites() const { return static_cast<int>(metabolite_ids.size()); }
  int num_reactions() const { return static_cast<int>(reaction_ids.size()); }
  int num_internal() const { return static_cast<int>(internal_indices.size()); }

  bool is_internal(int reaction) const;
  int reaction_index(const std::string& id) const;  // -1 if unknown

  /// Throws ValidationError if any structural invariant is violated.
  void validate() const;
};

/// Columns of S restricted to the internal reactions, in internal_indices order.
SparseMat internal_submatrix(const MetabolicModel& model);

/// Orthonormal basis of null(S_I), computed by rank-revealing QR of the dense
/// lift. Pivot magnitudes below rank_tol * (largest) count as zero.
Mat nullspace_basis(const SparseMat& s_internal, double rank_tol = 1e-9);

/// The 3-metabolite, 5-reaction network with one internal loop used as the
/// golden fixture throughout the test suite.
MetabolicModel build_example_loop_model();

struct FluxSolution {
  Vec v;
  double objective_value = 0.0;
  std::optional<Vec> delta_mu;  // length |I|, ordered as internal_indices
  std::optional<Vec> mu;        // length m
  SolveStatus status = SolveStatus::NumericalError;
};

}  // namespace llfba
