#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "llfba/model.hpp"

namespace llfba::enzyme {

/// Column bookkeeping for reversible-reaction splitting: original reaction j
/// maps to forward[j] and, when the reaction was reversible, backward[j]
/// (otherwise -1). Folding recovers v_j = v_forward - v_backward.
struct SplitMapping {
  std::vector<int> forward;
  std::vector<int> backward;

  bool is_identity() const;
  Vec fold(const Vec& v_split) const;
};

struct SplitModel {
  MetabolicModel model;
  SplitMapping mapping;
};

/// Splits every reversible reaction (l < 0) into a forward part with bounds
/// [0, max(u,0)] and a backward part with bounds [0, -l] whose column is the
/// negated forward column. Irreversible reactions pass through unchanged.
SplitModel split_reversible(const MetabolicModel& model);

struct EnzymeData {
  struct Enzyme {
    std::string id;
    std::vector<std::string> proteins;
    double capacity = 0.0;                 // [E], mmol/gDW
    std::vector<std::string> reactions;    // catalyzed reaction ids
  };
  std::uint64_t seed = 0;
  double group_capacity = 0.5;  // mmol/gDW per mass group
  std::vector<Enzyme> enzymes;
  std::map<std::string, double> kcat_forward;   // reaction id -> 1/h
  std::map<std::string, double> kcat_backward;  // reaction id -> 1/h
  std::map<std::string, double> protein_molar_mass;  // g/mmol
  std::map<std::string, std::string> protein_group;  // "A" or "B"
};

/// Seeded random kinetic data over an (already split) model: one synthetic
/// single-protein enzyme per reaction, |N(0,1)| turnover numbers truncated
/// below at 1e-3, uniform (0,1] molar masses, Bernoulli(1/2) group assignment
/// and capacities uniform in [0,1000]. Deterministic given the seed.
EnzymeData generate_enzyme_data(const MetabolicModel& split_model, std::uint64_t seed);

void save_enzyme_data(const EnzymeData& data, const std::string& path);
EnzymeData load_enzyme_data(const std::string& path);

struct EnzymeModel {
  MetabolicModel base;  // split model; all reactions irreversible
  SplitMapping mapping;
  std::vector<std::string> enzyme_ids;
  Vec enzyme_capacity;  // length p

  // Mass-balance couplings: -v[reaction]/kcat + e[enzyme] = 0 per enzyme row.
  struct Coupling {
    int enzyme;
    int reaction;
    double kcat;
  };
  std::vector<Coupling> couplings;

  struct MassGroup {
    std::string name;
    double capacity;
    std::vector<std::pair<int, double>> members;  // (enzyme index, molar mass)
  };
  std::vector<MassGroup> groups;

  int num_enzymes() const { return static_cast<int>(enzyme_ids.size()); }

  /// The (m+p) x (n+p) block matrix [[S, 0], [diag(-1/kcat), I_p]].
  SparseMat extended_matrix() const;
};

/// Throws ValidationError if a catalyzed reaction lacks a turnover number.
EnzymeModel build_enzyme_model(const SplitModel& split, const EnzymeData& data);

}  // namespace llfba::enzyme
