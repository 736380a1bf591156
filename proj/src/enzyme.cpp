#include "llfba/enzyme.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"
#include "llfba/errors.hpp"

namespace llfba::enzyme {

using nlohmann::json;

bool SplitMapping::is_identity() const {
  for (size_t j = 0; j < forward.size(); ++j) {
    if (backward[j] >= 0 || forward[j] != static_cast<int>(j)) return false;
  }
  return true;
}

Vec SplitMapping::fold(const Vec& v_split) const {
  Vec v = Vec::Zero(static_cast<int>(forward.size()));
  for (size_t j = 0; j < forward.size(); ++j) {
    v[j] = v_split[forward[j]];
    if (backward[j] >= 0) v[j] -= v_split[backward[j]];
  }
  return v;
}

SplitModel split_reversible(const MetabolicModel& model) {
  model.validate();
  SplitModel out;
  MetabolicModel& split = out.model;
  split.metabolite_ids = model.metabolite_ids;
  const int n = model.num_reactions();

  out.mapping.forward.resize(n);
  out.mapping.backward.assign(n, -1);

  std::vector<Eigen::Triplet<double>> entries;
  std::vector<double> lb, ub, obj;
  auto add_column = [&](const std::string& id, int source_col, double sign, double l, double u,
                        double c) {
    const int col = static_cast<int>(split.reaction_ids.size());
    split.reaction_ids.push_back(id);
    for (SparseMat::InnerIterator it(model.stoichiometry, source_col); it; ++it) {
      entries.emplace_back(static_cast<int>(it.row()), col, sign * it.value());
    }
    lb.push_back(l);
    ub.push_back(u);
    obj.push_back(c);
    return col;
  };

  for (int j = 0; j < n; ++j) {
    const bool reversible = model.lower_bounds[j] < 0.0;
    if (!reversible) {
      out.mapping.forward[j] = add_column(model.reaction_ids[j], j, 1.0, model.lower_bounds[j],
                                          model.upper_bounds[j], model.objective[j]);
    } else {
      out.mapping.forward[j] =
          add_column(model.reaction_ids[j] + "_fwd", j, 1.0, 0.0,
                     std::max(model.upper_bounds[j], 0.0), model.objective[j]);
      out.mapping.backward[j] = add_column(model.reaction_ids[j] + "_bwd", j, -1.0, 0.0,
                                           -model.lower_bounds[j], -model.objective[j]);
    }
    if (model.is_internal(j)) {
      split.internal_indices.push_back(out.mapping.forward[j]);
      if (out.mapping.backward[j] >= 0) split.internal_indices.push_back(out.mapping.backward[j]);
    }
  }

  const int n_split = static_cast<int>(split.reaction_ids.size());
  split.stoichiometry.resize(model.num_metabolites(), n_split);
  split.stoichiometry.setFromTriplets(entries.begin(), entries.end());
  split.lower_bounds = Eigen::Map<Vec>(lb.data(), n_split);
  split.upper_bounds = Eigen::Map<Vec>(ub.data(), n_split);
  split.objective = Eigen::Map<Vec>(obj.data(), n_split);
  std::sort(split.internal_indices.begin(), split.internal_indices.end());
  split.validate();
  return out;
}

EnzymeData generate_enzyme_data(const MetabolicModel& split_model, std::uint64_t seed) {
  EnzymeData data;
  data.seed = seed;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> capacity(0.0, 1000.0);
  std::bernoulli_distribution coin(0.5);

  auto sample_kcat = [&]() { return std::max(std::fabs(normal(rng)), 1e-3); };

  for (const auto& rid : split_model.reaction_ids) {
    EnzymeData::Enzyme enzyme;
    enzyme.id = "E_" + rid;
    const std::string protein = "P_" + rid;
    enzyme.proteins = {protein};
    enzyme.capacity = capacity(rng);
    enzyme.reactions = {rid};
    data.enzymes.push_back(enzyme);
    data.kcat_forward[rid] = sample_kcat();
    data.kcat_backward[rid] = sample_kcat();
    // uniform on (0, 1]
    data.protein_molar_mass[protein] = 1.0 - unit(rng);
    data.protein_group[protein] = coin(rng) ? "A" : "B";
  }
  return data;
}

void save_enzyme_data(const EnzymeData& data, const std::string& path) {
  json doc;
  doc["seed"] = data.seed;
  doc["group_capacity"] = data.group_capacity;
  json enzymes = json::array();
  for (const auto& e : data.enzymes) {
    enzymes.push_back({{"id", e.id},
                       {"proteins", e.proteins},
                       {"capacity", e.capacity},
                       {"reactions", e.reactions}});
  }
  doc["enzymes"] = enzymes;
  doc["kcat_forward"] = data.kcat_forward;
  doc["kcat_backward"] = data.kcat_backward;
  doc["protein_molar_mass"] = data.protein_molar_mass;
  doc["protein_group"] = data.protein_group;
  std::ofstream out(path);
  if (!out) throw IoError("cannot open file for writing: " + path);
  out << doc.dump(1) << "\n";
}

EnzymeData load_enzyme_data(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  json doc;
  try {
    in >> doc;
    EnzymeData data;
    data.seed = doc.at("seed").get<std::uint64_t>();
    data.group_capacity = doc.at("group_capacity").get<double>();
    for (const auto& e : doc.at("enzymes")) {
      EnzymeData::Enzyme enzyme;
      enzyme.id = e.at("id").get<std::string>();
      enzyme.proteins = e.at("proteins").get<std::vector<std::string>>();
      enzyme.capacity = e.at("capacity").get<double>();
      enzyme.reactions = e.at("reactions").get<std::vector<std::string>>();
      data.enzymes.push_back(enzyme);
    }
    data.kcat_forward = doc.at("kcat_forward").get<std::map<std::string, double>>();
    data.kcat_backward = doc.at("kcat_backward").get<std::map<std::string, double>>();
    data.protein_molar_mass =
        doc.at("protein_molar_mass").get<std::map<std::string, double>>();
    data.protein_group = doc.at("protein_group").get<std::map<std::string, std::string>>();
    return data;
  } catch (const json::exception& e) {
    throw ParseError("enzyme data schema error in " + path + ": " + e.what());
  }
}

EnzymeModel build_enzyme_model(const SplitModel& split, const EnzymeData& data) {
  EnzymeModel model;
  model.base = split.model;
  model.mapping = split.mapping;

  const int p_count = static_cast<int>(data.enzymes.size());
  model.enzyme_capacity = Vec::Zero(p_count);
  std::map<std::string, int> enzyme_index;
  for (int i = 0; i < p_count; ++i) {
    const auto& e = data.enzymes[i];
    if (e.capacity < 0.0 || e.capacity > 1000.0) {
      throw ValidationError("enzyme capacity out of [0, 1000] for " + e.id);
    }
    enzyme_index[e.id] = i;
    model.enzyme_ids.push_back(e.id);
    model.enzyme_capacity[i] = e.capacity;
    for (const auto& rid : e.reactions) {
      const int col = model.base.reaction_index(rid);
      if (col < 0) throw ValidationError("enzyme " + e.id + " catalyzes unknown reaction " + rid);
      auto kcat = data.kcat_forward.find(rid);
      if (kcat == data.kcat_forward.end()) {
        throw ValidationError("missing turnover number for catalyzed reaction " + rid);
      }
      if (kcat->second <= 0.0) {
        throw ValidationError("turnover number must be strictly positive for " + rid);
      }
      model.couplings.push_back({i, col, kcat->second});
    }
  }

  std::map<std::string, std::vector<std::pair<int, double>>> groups;
  for (int i = 0; i < p_count; ++i) {
    for (const auto& protein : data.enzymes[i].proteins) {
      auto mass = data.protein_molar_mass.find(protein);
      auto group = data.protein_group.find(protein);
      if (mass == data.protein_molar_mass.end() || group == data.protein_group.end()) {
        throw ValidationError("missing molar mass or group for protein " + protein);
      }
      groups[group->second].emplace_back(i, mass->second);
    }
  }
  for (auto& [name, members] : groups) {
    model.groups.push_back({name, data.group_capacity, std::move(members)});
  }
  return model;
}

SparseMat EnzymeModel::extended_matrix() const {
  const int m = base.num_metabolites();
  const int n = base.num_reactions();
  const int p = num_enzymes();
  SparseMat s(m + p, n + p);
  std::vector<Eigen::Triplet<double>> entries;
  for (int j = 0; j < base.stoichiometry.outerSize(); ++j) {
    for (SparseMat::InnerIterator it(base.stoichiometry, j); it; ++it) {
      entries.emplace_back(static_cast<int>(it.row()), j, it.value());
    }
  }
  for (const auto& c : couplings) {
    entries.emplace_back(m + c.enzyme, c.reaction, -1.0 / c.kcat);
  }
  for (int i = 0; i < p; ++i) entries.emplace_back(m + i, n + i, 1.0);
  s.setFromTriplets(entries.begin(), entries.end());
  return s;
}

}  // namespace llfba::enzyme
