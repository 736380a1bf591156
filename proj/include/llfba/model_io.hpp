#pragma once

#include <string>

#include "llfba/model.hpp"

namespace llfba::io {

/// Loads a BiGG-style JSON model document. Exchange reactions are detected in
/// this order: explicit "is_exchange" flag, then an "EX_"/"DM_"/"SK_" id
/// prefix, then the single-metabolite column heuristic. All remaining
/// reactions form the internal set.
/// Throws ParseError on malformed JSON/schema, ValidationError on dangling
/// metabolite references or l > u.
MetabolicModel load_model(const std::string& path);

/// Writes the model back as a JSON document; load_model(save_model(m)) is the
/// identity on document content.
void save_model(const MetabolicModel& model, const std::string& path);

/// Solution JSON: per-reaction-id flux map, objective, status; delta_mu/mu
/// keys present only when the certificate exists.
void save_solution(const MetabolicModel& model, const FluxSolution& solution,
                   const std::string& path);

/// Reads a solution written by save_solution, mapping fluxes back through the
/// model's reaction ids.
FluxSolution load_solution(const MetabolicModel& model, const std::string& path);

}  // namespace llfba::io
