#pragma once

#include <cstdint>

#include "llfba/model.hpp"

namespace llfba::test {

/// Seeded random small model: up to 8 metabolites, up to 12 reactions, up to
/// 8 internal reactions, entries in {-2,-1,1,2}, bounds with 0 always
/// feasible (l in [-30,0], u in [0,30]). Deterministic per seed.
MetabolicModel random_model(std::uint64_t seed);

/// Two disjoint copies of the example loop network glued into one model:
/// 6 metabolites, 10 reactions, two independent internal cycles.
MetabolicModel build_two_cycle_model();

}  // namespace llfba::test
