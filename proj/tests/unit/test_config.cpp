#include <doctest.h>

#include <wavesim/config.hpp>
#include <wavesim/error.hpp>

#include <filesystem>
#include <fstream>
#include <string>

using namespace wavesim;

namespace {

std::string message_of(std::string_view text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("empty object keeps the defaults") {
    const auto c = parse_config("{}");
    CHECK(c.bandwidth_hours == 720);
    CHECK(c.hm0_order == ArmaOrder{3, 0});
    CHECK(c.tm02_order == ArmaOrder{3, 2});
    CHECK(c.steepness_bins == 108);
    CHECK(c.max_gap_hours == 5);
    CHECK(c.copula_candidates.size() == 8);
}

TEST_CASE("values are read") {
    const auto c = parse_config(R"({"bandwidth_hours": 360, "arma_orders": {"hm0": [2, 1]},
        "copula_candidates": ["frank", "gaussian"], "seed": 42, "seasons": {"summer": 3700}})");
    CHECK(c.bandwidth_hours == 360);
    CHECK(c.hm0_order == ArmaOrder{2, 1});
    CHECK(c.tm02_order == ArmaOrder{3, 2});
    CHECK(c.copula_candidates == std::vector{copula::Family::frank, copula::Family::gaussian});
    CHECK(c.seed == 42);
    CHECK(c.seasons.season_of(3699) == Season::spring);
    CHECK(c.seasons.season_of(3700) == Season::summer);
}

TEST_CASE("echo round trip") {
    auto c = parse_config(R"({"bandwidth_hours": 500, "coefficient_alpha": 0.01})");
    const auto again = parse_config(config_to_json(c));
    CHECK(config_to_json(again) == config_to_json(c));
    CHECK(again.bandwidth_hours == 500);
}

TEST_CASE("errors name the offending key") {
    CHECK(message_of(R"({"bandwith_hours": 1})").find("bandwith_hours") != std::string::npos);
    CHECK(message_of(R"({"arma_orders": {"hs": [1, 0]}})").find("arma_orders.hs") != std::string::npos);
    CHECK(message_of(R"({"bandwidth_hours": "wide"})").find("bandwidth_hours") != std::string::npos);
    CHECK(message_of(R"({"bandwidth_hours": 1})").find("bandwidth_hours") != std::string::npos);
    CHECK(message_of(R"({"arma_orders": {"hm0": [1]}})").find("arma_orders.hm0") != std::string::npos);
    CHECK(message_of(R"({"copula_candidates": ["frank", "frank"]})").find("copula_candidates") != std::string::npos);
    CHECK_FALSE(message_of(R"({"copula_candidates": ["tawn"]})").empty());
    CHECK_FALSE(message_of("[1, 2]").empty());
    CHECK_FALSE(message_of("{broken").empty());
}

TEST_CASE("config files") {
    const auto path = std::filesystem::temp_directory_path() / "wavesim_config_test.json";
    {
        std::ofstream out(path);
        out << R"({"steepness_bins": 54})";
    }
    CHECK(load_config(path).steepness_bins == 54);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_config(path), IoError);
}

}
