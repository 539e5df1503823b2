#pragma once

// JSON conversions shared by the config, model file and report writers.

#include "wavesim/config.hpp"
#include "wavesim/copula.hpp"

#include <json.hpp>

namespace wavesim::detail {

using json = nlohmann::json;

json config_json(const RunConfig& config);
RunConfig config_from_json(const json& j);

json copula_json(const copula::CopulaSpec& c);
copula::CopulaSpec copula_from_json(const json& j);

json seasons_json(const SeasonBoundaries& s);
SeasonBoundaries seasons_from_json(const json& j);

/// Doubles may be stored as null to mean NaN.
json number_or_null(double v);
double number_or_nan(const json& j);

} // namespace wavesim::detail
