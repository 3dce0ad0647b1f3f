#pragma once

#include <nlohmann/json.hpp>

#include "sgicl/core.hpp"
#include "sgicl/templating.hpp"

namespace sgicl {

// JSON shapes shared by the cache, audit records and the Python bindings.

nlohmann::json to_json(const GeneratedDemonstration& demo);
/// Throws kCacheIntegrity on a malformed object.
GeneratedDemonstration demonstration_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Example& example);

/// {"label": word, "kind": "gold"|"generated", ...fields}
nlohmann::json to_json(const TaskSpec& task, const Demonstration& demo);

/// {"scores": {word: logprob}, "predicted": word}
nlohmann::json to_json(const TaskSpec& task, const Prediction& prediction);

}  // namespace sgicl
