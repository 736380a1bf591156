#include "llfba/model_io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <vector>

#include "json.hpp"
#include "llfba/errors.hpp"

namespace llfba::io {

using nlohmann::json;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError("malformed JSON in " + path + ": " + e.what());
  }
  return doc;
}

void write_json(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open file for writing: " + path);
  out << doc.dump(1) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

bool has_exchange_prefix(const std::string& id) {
  return id.rfind("EX_", 0) == 0 || id.rfind("DM_", 0) == 0 || id.rfind("SK_", 0) == 0;
}

}  // namespace

MetabolicModel load_model(const std::string& path) {
  const json doc = read_json(path);
  if (!doc.is_object() || !doc.contains("metabolites") || !doc.contains("reactions")) {
    throw ParseError("model document must contain 'metabolites' and 'reactions': " + path);
  }

  MetabolicModel model;
  std::map<std::string, int> met_index;
  try {
    for (const auto& met : doc.at("metabolites")) {
      const std::string id = met.at("id").get<std::string>();
      if (met_index.count(id)) throw ValidationError("duplicate metabolite id: " + id);
      met_index[id] = static_cast<int>(model.metabolite_ids.size());
      model.metabolite_ids.push_back(id);
    }

    const auto& reactions = doc.at("reactions");
    const int n = static_cast<int>(reactions.size());
    const int m = static_cast<int>(model.metabolite_ids.size());
    model.lower_bounds = Vec::Zero(n);
    model.upper_bounds = Vec::Zero(n);
    model.objective = Vec::Zero(n);
    std::vector<Eigen::Triplet<double>> entries;
    std::set<std::string> seen_reactions;

    for (int j = 0; j < n; ++j) {
      const auto& rxn = reactions.at(j);
      const std::string id = rxn.at("id").get<std::string>();
      if (!seen_reactions.insert(id).second) {
        throw ValidationError("duplicate reaction id: " + id);
      }
      model.reaction_ids.push_back(id);
      model.lower_bounds[j] = rxn.at("lower_bound").get<double>();
      model.upper_bounds[j] = rxn.at("upper_bound").get<double>();
      model.objective[j] = rxn.value("objective_coefficient", 0.0);
      int nnz = 0;
      for (const auto& [met_id, coeff] : rxn.at("metabolites").items()) {
        auto it = met_index.find(met_id);
        if (it == met_index.end()) {
          throw ValidationError("reaction " + id + " references unknown metabolite " + met_id);
        }
        const double value = coeff.get<double>();
        if (value != 0.0) {
          entries.emplace_back(it->second, j, value);
          ++nnz;
        }
      }
      bool exchange;
      if (rxn.contains("is_exchange")) {
        exchange = rxn.at("is_exchange").get<bool>();
      } else if (has_exchange_prefix(id)) {
        exchange = true;
      } else {
        exchange = nnz <= 1;
      }
      if (!exchange) model.internal_indices.push_back(j);
    }
    model.stoichiometry.resize(m, n);
    model.stoichiometry.setFromTriplets(entries.begin(), entries.end());
  } catch (const json::exception& e) {
    throw ParseError("model schema error in " + path + ": " + e.what());
  }

  model.validate();
  return model;
}

void save_model(const MetabolicModel& model, const std::string& path) {
  json doc;
  doc["schema_version"] = "1";
  json mets = json::array();
  for (const auto& id : model.metabolite_ids) {
    mets.push_back({{"id", id}, {"compartment", "c"}});
  }
  doc["metabolites"] = mets;
  json rxns = json::array();
  for (int j = 0; j < model.num_reactions(); ++j) {
    json rxn;
    rxn["id"] = model.reaction_ids[j];
    rxn["lower_bound"] = model.lower_bounds[j];
    rxn["upper_bound"] = model.upper_bounds[j];
    rxn["objective_coefficient"] = model.objective[j];
    json coeffs = json::object();
    for (SparseMat::InnerIterator it(model.stoichiometry, j); it; ++it) {
      coeffs[model.metabolite_ids[it.row()]] = it.value();
    }
    rxn["metabolites"] = coeffs;
    rxn["is_exchange"] = !model.is_internal(j);
    rxns.push_back(rxn);
  }
  doc["reactions"] = rxns;
  write_json(doc, path);
}

void save_solution(const MetabolicModel& model, const FluxSolution& solution,
                   const std::string& path) {
  json doc;
  doc["status"] = to_string(solution.status);
  doc["objective"] = solution.objective_value;
  json fluxes = json::object();
  for (int j = 0; j < model.num_reactions() && j < solution.v.size(); ++j) {
    fluxes[model.reaction_ids[j]] = solution.v[j];
  }
  doc["fluxes"] = fluxes;
  if (solution.delta_mu) {
    json dm = json::object();
    for (int k = 0; k < model.num_internal(); ++k) {
      dm[model.reaction_ids[model.internal_indices[k]]] = (*solution.delta_mu)[k];
    }
    doc["delta_mu"] = dm;
  }
  if (solution.mu) {
    json mu = json::object();
    for (int i = 0; i < model.num_metabolites(); ++i) {
      mu[model.metabolite_ids[i]] = (*solution.mu)[i];
    }
    doc["mu"] = mu;
  }
  write_json(doc, path);
}

FluxSolution load_solution(const MetabolicModel& model, const std::string& path) {
  const json doc = read_json(path);
  FluxSolution sol;
  try {
    auto status = parse_status(doc.at("status").get<std::string>());
    if (!status) throw ParseError("unknown status in " + path);
    sol.status = *status;
    sol.objective_value = doc.at("objective").get<double>();
    sol.v = Vec::Zero(model.num_reactions());
    for (const auto& [id, value] : doc.at("fluxes").items()) {
      const int j = model.reaction_index(id);
      if (j < 0) throw ValidationError("solution references unknown reaction " + id);
      sol.v[j] = value.get<double>();
    }
    if (doc.contains("delta_mu")) {
      Vec dm = Vec::Zero(model.num_internal());
      for (const auto& [id, value] : doc.at("delta_mu").items()) {
        const int j = model.reaction_index(id);
        for (int k = 0; k < model.num_internal(); ++k) {
          if (model.internal_indices[k] == j) dm[k] = value.get<double>();
        }
      }
      sol.delta_mu = dm;
    }
    if (doc.contains("mu")) {
      Vec mu = Vec::Zero(model.num_metabolites());
      for (const auto& [id, value] : doc.at("mu").items()) {
        for (int i = 0; i < model.num_metabolites(); ++i) {
          if (model.metabolite_ids[i] == id) mu[i] = value.get<double>();
        }
      }
      sol.mu = mu;
    }
  } catch (const json::exception& e) {
    throw ParseError("solution schema error in " + path + ": " + e.what());
  }
  return sol;
}

}  // namespace llfba::io
