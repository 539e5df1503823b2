#pragma once

#include "wavesim/calendar.hpp"
#include "wavesim/copula.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wavesim {

struct ArmaOrder {
    int p = 0;
    int q = 0;

    friend bool operator==(const ArmaOrder&, const ArmaOrder&) = default;
};

/// Every tunable of fitting and simulation.
struct RunConfig {
    int bandwidth_hours = 720;
    ArmaOrder hm0_order{3, 0};
    ArmaOrder tm02_order{3, 2};
    std::size_t steepness_bins = 108;
    double b_upper_m = 10.0;
    int max_gap_hours = 5;
    SeasonBoundaries seasons = SeasonBoundaries::meteorological();
    std::vector<copula::Family> copula_candidates{copula::kAllFamilies.begin(), copula::kAllFamilies.end()};
    std::uint64_t seed = 1;
    std::size_t burn_in_hours = 1000;
    int spline_half_width_hours = 72;
    double coefficient_alpha = 0.05;

    /// Throws ConfigError naming the first field outside its range.
    void validate() const;
};

/// Parses a JSON object; absent keys keep their defaults. Throws ConfigError
/// on unknown keys, wrong types or out-of-range values.
RunConfig parse_config(std::string_view json_text);
/// Throws IoError when unreadable.
RunConfig load_config(const std::filesystem::path& path);
/// Complete JSON echo of the effective configuration.
std::string config_to_json(const RunConfig& config, int indent = 2);

} // namespace wavesim
