#include "llfba/model.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "llfba/errors.hpp"

namespace llfba {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::Infeasible:
      return "Infeasible";
    case SolveStatus::Unbounded:
      return "Unbounded";
    case SolveStatus::TimeLimit:
      return "TimeLimit";
    case SolveStatus::NumericalError:
      return "NumericalError";
  }
  return "NumericalError";
}

std::optional<SolveStatus> parse_status(const std::string& text) {
  if (text == "Optimal") return SolveStatus::Optimal;
  if (text == "Infeasible") return SolveStatus::Infeasible;
  if (text == "Unbounded") return SolveStatus::Unbounded;
  if (text == "TimeLimit") return SolveStatus::TimeLimit;
  if (text == "NumericalError") return SolveStatus::NumericalError;
  return std::nullopt;
}

bool MetabolicModel::is_internal(int reaction) const {
  return std::binary_search(internal_indices.begin(), internal_indices.end(), reaction);
}

int MetabolicModel::reaction_index(const std::string& id) const {
  for (int j = 0; j < num_reactions(); ++j) {
    if (reaction_ids[j] == id) return j;
  }
  return -1;
}

void MetabolicModel::validate() const {
  const int m = num_metabolites();
  const int n = num_reactions();
  if (stoichiometry.rows() != m || stoichiometry.cols() != n) {
    throw ValidationError("stoichiometry shape does not match id lists");
  }
  if (lower_bounds.size() != n || upper_bounds.size() != n || objective.size() != n) {
    throw ValidationError("bound/objective vector length does not match reaction count");
  }
  for (int j = 0; j < n; ++j) {
    if (lower_bounds[j] > upper_bounds[j]) {
      throw ValidationError("lower bound exceeds upper bound for reaction " + reaction_ids[j]);
    }
  }
  int prev = -1;
  for (int idx : internal_indices) {
    if (idx < 0 || idx >= n) throw ValidationError("internal index out of range");
    if (idx <= prev) throw ValidationError("internal indices must be sorted and unique");
    prev = idx;
  }
  std::vector<bool> row_used(m, false);
  for (int col = 0; col < stoichiometry.outerSize(); ++col) {
    for (SparseMat::InnerIterator it(stoichiometry, col); it; ++it) {
      if (it.value() != 0.0) row_used[it.row()] = true;
    }
  }
  for (int i = 0; i < m; ++i) {
    if (!row_used[i]) {
      throw ValidationError("metabolite " + metabolite_ids[i] + " participates in no reaction");
    }
  }
}

SparseMat internal_submatrix(const MetabolicModel& model) {
  const int m = model.num_metabolites();
  SparseMat result(m, model.num_internal());
  std::vector<Eigen::Triplet<double>> entries;
  for (int j = 0; j < model.num_internal(); ++j) {
    const int col = model.internal_indices[j];
    for (SparseMat::InnerIterator it(model.stoichiometry, col); it; ++it) {
      entries.emplace_back(static_cast<int>(it.row()), j, it.value());
    }
  }
  result.setFromTriplets(entries.begin(), entries.end());
  return result;
}

Mat nullspace_basis(const SparseMat& s_internal, double rank_tol) {
  const Eigen::Index k = s_internal.cols();
  if (k == 0) return Mat(0, 0);
  // null(S_I) is the orthogonal complement of the row space, i.e. of
  // col(S_I^T). QR with column pivoting on S_I^T exposes the rank; the
  // trailing columns of Q span the complement.
  Mat st = Mat(s_internal).transpose();  // k x m
  Eigen::ColPivHouseholderQR<Mat> qr(st);
  qr.setThreshold(rank_tol);
  const Eigen::Index rank = qr.rank();
  Mat q = qr.householderQ() * Mat::Identity(k, k);
  return q.rightCols(k - rank);
}

MetabolicModel build_example_loop_model() {
  MetabolicModel model;
  model.metabolite_ids = {"A", "B", "C"};
  model.reaction_ids = {"r1", "r2", "r3", "r4", "r5"};
  std::vector<Eigen::Triplet<double>> entries = {
      {0, 0, 1.0},  {0, 1, -1.0}, {0, 3, -1.0},
      {1, 1, 1.0},  {1, 2, -1.0},
      {2, 2, 1.0},  {2, 3, 1.0},  {2, 4, -1.0},
  };
  model.stoichiometry.resize(3, 5);
  model.stoichiometry.setFromTriplets(entries.begin(), entries.end());
  model.lower_bounds = Vec(5);
  model.lower_bounds << 0, -30, -30, -30, 0;
  model.upper_bounds = Vec(5);
  model.upper_bounds << 10, 30, 30, 30, 10;
  model.objective = Vec(5);
  model.objective << 0, 1, 1, 1, 0;
  model.internal_indices = {1, 2, 3};
  model.validate();
  return model;
}

}  // namespace llfba
