#include "wavesim/config.hpp"

#include "detail/json_io.hpp"
#include "wavesim/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace wavesim {

namespace detail {

namespace {

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError(fmt::format("unknown configuration key '{}{}'", where, key));
        }
    }
}

template <typename T>
T get_as(const json& j, std::string_view key) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(fmt::format("configuration key '{}' has the wrong type", key));
    }
}

ArmaOrder order_from_json(const json& j, std::string_view key) {
    if (!j.is_array() || j.size() != 2) {
        throw ConfigError(fmt::format("configuration key '{}' must be a [p, q] pair", key));
    }
    return {get_as<int>(j[0], key), get_as<int>(j[1], key)};
}

} // namespace

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_nan(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json seasons_json(const SeasonBoundaries& s) {
    json j = json::object();
    for (Season season : kAllSeasons) {
        j[std::string(season_name(season))] = s.start_hour[static_cast<std::size_t>(season)];
    }
    return j;
}

SeasonBoundaries seasons_from_json(const json& j) {
    if (!j.is_object()) {
        throw ConfigError("'seasons' must be an object of season start hours");
    }
    reject_unknown(j, {"spring", "summer", "autumn", "winter"}, "seasons.");
    SeasonBoundaries s = SeasonBoundaries::meteorological();
    for (Season season : kAllSeasons) {
        const std::string name(season_name(season));
        if (j.contains(name)) {
            s.start_hour[static_cast<std::size_t>(season)] = get_as<std::int64_t>(j[name], "seasons." + name);
        }
    }
    return s;
}

json copula_json(const copula::CopulaSpec& c) {
    return json{{"family", std::string(copula::family_name(c.family))},
                {"rotation", c.rotation},
                {"par1", c.par1},
                {"par2", c.par2}};
}

copula::CopulaSpec copula_from_json(const json& j) {
    copula::CopulaSpec c;
    c.family = copula::family_from_name(j.at("family").get<std::string>());
    c.rotation = j.at("rotation").get<int>();
    c.par1 = j.at("par1").get<double>();
    c.par2 = j.at("par2").get<double>();
    return c;
}

json config_json(const RunConfig& c) {
    json candidates = json::array();
    for (auto f : c.copula_candidates) {
        candidates.push_back(std::string(copula::family_name(f)));
    }
    return json{{"bandwidth_hours", c.bandwidth_hours},
                {"arma_orders",
                 {{"hm0", {c.hm0_order.p, c.hm0_order.q}}, {"tm02", {c.tm02_order.p, c.tm02_order.q}}}},
                {"steepness_bins", c.steepness_bins},
                {"b_upper_m", c.b_upper_m},
                {"max_gap_hours", c.max_gap_hours},
                {"seasons", seasons_json(c.seasons)},
                {"copula_candidates", candidates},
                {"seed", c.seed},
                {"burn_in_hours", c.burn_in_hours},
                {"spline_half_width_hours", c.spline_half_width_hours},
                {"coefficient_alpha", c.coefficient_alpha}};
}

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) {
        throw ConfigError("configuration must be a JSON object");
    }
    reject_unknown(j,
                   {"bandwidth_hours", "arma_orders", "steepness_bins", "b_upper_m", "max_gap_hours", "seasons",
                    "copula_candidates", "seed", "burn_in_hours", "spline_half_width_hours", "coefficient_alpha"},
                   "");
    RunConfig c;
    if (j.contains("bandwidth_hours")) c.bandwidth_hours = get_as<int>(j["bandwidth_hours"], "bandwidth_hours");
    if (j.contains("arma_orders")) {
        const auto& o = j["arma_orders"];
        if (!o.is_object()) {
            throw ConfigError("'arma_orders' must be an object");
        }
        reject_unknown(o, {"hm0", "tm02"}, "arma_orders.");
        if (o.contains("hm0")) c.hm0_order = order_from_json(o["hm0"], "arma_orders.hm0");
        if (o.contains("tm02")) c.tm02_order = order_from_json(o["tm02"], "arma_orders.tm02");
    }
    if (j.contains("steepness_bins")) c.steepness_bins = get_as<std::size_t>(j["steepness_bins"], "steepness_bins");
    if (j.contains("b_upper_m")) c.b_upper_m = get_as<double>(j["b_upper_m"], "b_upper_m");
    if (j.contains("max_gap_hours")) c.max_gap_hours = get_as<int>(j["max_gap_hours"], "max_gap_hours");
    if (j.contains("seasons")) c.seasons = seasons_from_json(j["seasons"]);
    if (j.contains("copula_candidates")) {
        const auto& a = j["copula_candidates"];
        if (!a.is_array()) {
            throw ConfigError("'copula_candidates' must be an array of family names");
        }
        c.copula_candidates.clear();
        for (const auto& name : a) {
            c.copula_candidates.push_back(copula::family_from_name(get_as<std::string>(name, "copula_candidates")));
        }
    }
    if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j["seed"], "seed");
    if (j.contains("burn_in_hours")) c.burn_in_hours = get_as<std::size_t>(j["burn_in_hours"], "burn_in_hours");
    if (j.contains("spline_half_width_hours")) {
        c.spline_half_width_hours = get_as<int>(j["spline_half_width_hours"], "spline_half_width_hours");
    }
    if (j.contains("coefficient_alpha")) {
        c.coefficient_alpha = get_as<double>(j["coefficient_alpha"], "coefficient_alpha");
    }
    c.validate();
    return c;
}

} // namespace detail

void RunConfig::validate() const {
    auto fail = [](std::string_view key, std::string_view rule) {
        throw ConfigError(fmt::format("configuration key '{}' {}", key, rule));
    };
    if (bandwidth_hours < 2 || bandwidth_hours > kHoursPerYear) fail("bandwidth_hours", "must lie in [2, 8766]");
    for (const auto& [name, o] : {std::pair{"arma_orders.hm0", hm0_order}, std::pair{"arma_orders.tm02", tm02_order}}) {
        if (o.p < 0 || o.q < 0 || o.p > 10 || o.q > 10) fail(name, "orders must lie in [0, 10]");
    }
    if (steepness_bins < 4 || steepness_bins > 100000) fail("steepness_bins", "must lie in [4, 100000]");
    if (!(b_upper_m > 0.0) || !std::isfinite(b_upper_m)) fail("b_upper_m", "must be positive");
    if (max_gap_hours < 0 || max_gap_hours > 48) fail("max_gap_hours", "must lie in [0, 48]");
    seasons.validate();
    if (copula_candidates.empty()) fail("copula_candidates", "must name at least one family");
    if (std::set(copula_candidates.begin(), copula_candidates.end()).size() != copula_candidates.size()) {
        fail("copula_candidates", "must not repeat a family");
    }
    if (burn_in_hours > 1000000) fail("burn_in_hours", "must not exceed 1000000");
    if (spline_half_width_hours < 0 || spline_half_width_hours > 1000) {
        fail("spline_half_width_hours", "must lie in [0, 1000]");
    }
    if (!(coefficient_alpha > 0.0 && coefficient_alpha < 1.0)) fail("coefficient_alpha", "must lie in (0, 1)");
}

RunConfig parse_config(std::string_view json_text) {
    detail::json j;
    try {
        j = detail::json::parse(json_text);
    } catch (const detail::json::parse_error& e) {
        throw ConfigError(fmt::format("configuration is not valid JSON: {}", e.what()));
    }
    return detail::config_from_json(j);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(fmt::format("cannot open configuration file '{}'", path.string()));
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string config_to_json(const RunConfig& config, int indent) { return detail::config_json(config).dump(indent); }

} // namespace wavesim
