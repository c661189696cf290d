#pragma once

#include <string>

#include <json.hpp>

#include "rqsim/gateset.hpp"

namespace rqsim {

using Json = nlohmann::json;

// Circuit JSON schema (documented in the README):
//   {"gates": [{"name": "...", "sites": [...], "params": [...],
//               "composite": bool, "expansion": [...]?}, ...],
//    "final_permutation": [...],                    // optional
//    "trotter": {"step","tau","n_steps","order"}}   // optional
// Registers serialize separately as [{"kind":"qubit"} | {"kind":"mode","dim":d}].
// Round-trip fidelity is required, bit-exactness is not.

Json register_to_json(const Register& reg);
Register register_from_json(const Json& j);

/// expand_composites=false keeps composite gates as (name, sites, params) with
/// their expansion; true emits the flattened primitive list instead.
Json circuit_to_json(const Circuit& c, bool expand_composites = false);
Circuit circuit_from_json(const Json& j);

std::string circuit_to_string(const Circuit& c, bool expand_composites = false);
Circuit circuit_from_string(const std::string& s);

}  // namespace rqsim
