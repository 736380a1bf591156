#include "generators.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <vector>

namespace llfba::test {

MetabolicModel random_model(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> met_count(2, 8);
  std::uniform_int_distribution<int> rxn_count(3, 12);
  std::uniform_int_distribution<int> coef(1, 2);
  std::uniform_real_distribution<double> mag(5.0, 30.0);
  std::bernoulli_distribution coin(0.5);

  const int m = met_count(rng);
  const int n = rxn_count(rng);

  MetabolicModel model;
  for (int i = 0; i < m; ++i) model.metabolite_ids.push_back("M" + std::to_string(i));
  for (int j = 0; j < n; ++j) model.reaction_ids.push_back("R" + std::to_string(j));

  std::uniform_int_distribution<int> met_pick(0, m - 1);
  std::uniform_int_distribution<int> nnz_pick(1, std::min(3, m));
  std::vector<Eigen::Triplet<double>> entries;
  std::vector<bool> row_used(m, false);
  for (int j = 0; j < n; ++j) {
    std::set<int> rows;
    const int nnz = nnz_pick(rng);
    while (static_cast<int>(rows.size()) < nnz) rows.insert(met_pick(rng));
    for (int i : rows) {
      const double value = (coin(rng) ? 1.0 : -1.0) * coef(rng);
      entries.emplace_back(i, j, value);
      row_used[i] = true;
    }
  }
  // Touch any leftover metabolite so every row carries at least one entry.
  for (int i = 0; i < m; ++i) {
    if (!row_used[i]) {
      std::uniform_int_distribution<int> rxn_pick(0, n - 1);
      entries.emplace_back(i, rxn_pick(rng), coin(rng) ? 1.0 : -1.0);
    }
  }
  model.stoichiometry.resize(m, n);
  model.stoichiometry.setFromTriplets(entries.begin(), entries.end());

  model.lower_bounds = Vec::Zero(n);
  model.upper_bounds = Vec::Zero(n);
  model.objective = Vec::Zero(n);
  for (int j = 0; j < n; ++j) {
    model.lower_bounds[j] = coin(rng) ? -mag(rng) : 0.0;
    model.upper_bounds[j] = mag(rng);
    model.objective[j] = coin(rng) ? 1.0 : 0.0;
  }
  if (model.objective.cwiseAbs().sum() == 0.0) model.objective[0] = 1.0;

  std::vector<int> candidates(n);
  for (int j = 0; j < n; ++j) candidates[j] = j;
  std::shuffle(candidates.begin(), candidates.end(), rng);
  std::uniform_int_distribution<int> internal_count(1, std::min(8, n));
  const int ni = internal_count(rng);
  model.internal_indices.assign(candidates.begin(), candidates.begin() + ni);
  std::sort(model.internal_indices.begin(), model.internal_indices.end());

  model.validate();
  return model;
}

MetabolicModel build_two_cycle_model() {
  const MetabolicModel base = build_example_loop_model();
  const int m = base.num_metabolites();
  const int n = base.num_reactions();

  MetabolicModel model;
  for (int copy = 0; copy < 2; ++copy) {
    const std::string tag = copy == 0 ? "" : "_b";
    for (const auto& id : base.metabolite_ids) model.metabolite_ids.push_back(id + tag);
    for (const auto& id : base.reaction_ids) model.reaction_ids.push_back(id + tag);
  }
  std::vector<Eigen::Triplet<double>> entries;
  for (int copy = 0; copy < 2; ++copy) {
    for (int j = 0; j < base.stoichiometry.outerSize(); ++j) {
      for (SparseMat::InnerIterator it(base.stoichiometry, j); it; ++it) {
        entries.emplace_back(static_cast<int>(it.row()) + copy * m, j + copy * n, it.value());
      }
    }
  }
  model.stoichiometry.resize(2 * m, 2 * n);
  model.stoichiometry.setFromTriplets(entries.begin(), entries.end());
  model.lower_bounds = Vec(2 * n);
  model.lower_bounds << base.lower_bounds, base.lower_bounds;
  model.upper_bounds = Vec(2 * n);
  model.upper_bounds << base.upper_bounds, base.upper_bounds;
  model.objective = Vec(2 * n);
  model.objective << base.objective, base.objective;
  for (int copy = 0; copy < 2; ++copy) {
    for (int idx : base.internal_indices) model.internal_indices.push_back(idx + copy * n);
  }
  std::sort(model.internal_indices.begin(), model.internal_indices.end());
  model.validate();
  return model;
}

}  // namespace llfba::test
