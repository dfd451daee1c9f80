#pragma once

#include <string>

#include "cbv/system_u.hpp"
#include "json.hpp"

namespace cbv {

// Serialization of derivations; the format is described in
// docs/derivation-schema.md. Reading throws std::invalid_argument on a
// malformed document and SyntaxError on unparsable terms or types. Reading
// does not check the derivation.
nlohmann::json derivation_to_json(const Derivation& d);
Derivation derivation_from_json(const nlohmann::json& j);

nlohmann::json env_to_json(const TypingEnv& env);
TypingEnv env_from_json(const nlohmann::json& j);

}  // namespace cbv
