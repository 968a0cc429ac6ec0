#pragma once

#include <utility>

#include <json.hpp>

#include "qmetrix/core_states.hpp"

namespace qmetrix {

/// {parties, local_dim, kind, local_eigenvalues, weights}. Doubles are written
/// in shortest round-trip form, which reproduces every bit of the value.
nlohmann::json probe_to_json(const Generator& g, const ProbeState& state);

/// Inverse of probe_to_json. Validates both objects; throws
/// std::invalid_argument on malformed input.
std::pair<Generator, ProbeState> probe_from_json(const nlohmann::json& j);

}  // namespace qmetrix
