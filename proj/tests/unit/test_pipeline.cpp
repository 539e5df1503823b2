#include <doctest.h>

#include <wavesim/error.hpp>
#include <wavesim/pipeline.hpp>
#include <wavesim/steepness.hpp>

#include "truth_model.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

using namespace wavesim;
using json = nlohmann::json;

namespace {

constexpr std::size_t kYear = static_cast<std::size_t>(kHoursPerYear);

const pipeline::FittedModel& truth() {
    static const auto m = testing::truth_model();
    return m;
}

std::string resign(json doc) {
    doc["checksum"] = pipeline::body_checksum(doc["body"].dump());
    return doc.dump();
}

} // namespace

TEST_SUITE("pipeline") {

TEST_CASE("one year of data is rejected at ingest") {
    const auto record = testing::synthetic_record(1, 1);
    try {
        pipeline::fit_all(record, RunConfig{});
        FAIL("expected SizeError");
    } catch (const SizeError& e) {
        CHECK(std::string(e.what()).find("ingest") != std::string::npos);
    }
}

TEST_CASE("simulation shape and physical bounds") {
    const auto& m = truth();
    const auto out = pipeline::simulate(m, 3, 11);
    const auto& s = out.series;
    REQUIRE(s.size() == 3 * kYear);
    CHECK(s.whole_years() == 3);
    CHECK(out.model_hash == pipeline::model_fingerprint(m));
    CHECK_NOTHROW(s.validate());
    for (std::size_t i = 0; i < s.size(); ++i) {
        REQUIRE((s.regime[i] == 0 || s.regime[i] == 1));
        REQUIRE(s.hm0[i] >= m.hm0_cdf.min());
        REQUIRE(s.hm0[i] <= m.hm0_cdf.max());
        REQUIRE(steepness::steepness(s.hm0[i], s.tm02[i]) <= m.steepness.s_max(s.hm0[i]) + 1e-9);
    }
    CHECK_THROWS_AS(pipeline::simulate(m, 0, 1), DomainError);
}

TEST_CASE("simulation is deterministic in the seed") {
    const auto& m = truth();
    const auto a = pipeline::simulate(m, 2, 5).series;
    const auto b = pipeline::simulate(m, 2, 5).series;
    const auto c = pipeline::simulate(m, 2, 6).series;
    CHECK(a.hm0 == b.hm0);
    CHECK(a.tm02 == b.tm02);
    CHECK(a.regime == b.regime);
    CHECK(a.hm0 != c.hm0);
}

TEST_CASE("simulation csv round trip") {
    const auto s = pipeline::simulate(truth(), 1, 3).series;
    std::stringstream io;
    pipeline::write_simulation_csv(io, s);
    std::string header;
    std::getline(io, header);
    CHECK(header == "model_year,hour_of_year,hm0_m,tm02_s,regime");
    io.seekg(0);
    const auto back = pipeline::read_simulation_csv(io);
    REQUIRE(back.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        REQUIRE(back.hm0[i] == doctest::Approx(s.hm0[i]).epsilon(1e-9));
        REQUIRE(back.tm02[i] == doctest::Approx(s.tm02[i]).epsilon(1e-9));
        REQUIRE(back.regime[i] == s.regime[i]);
    }
}

TEST_CASE("simulation csv rejects malformed input") {
    std::istringstream empty("");
    CHECK_THROWS_AS(pipeline::read_simulation_csv(empty), FormatError);
    std::istringstream header("hm0,tm02\n1,2\n");
    CHECK_THROWS_AS(pipeline::read_simulation_csv(header), FormatError);
    std::istringstream gap("model_year,hour_of_year,hm0_m,tm02_s,regime\n1,0,1.0,5.0,0\n1,2,1.0,5.0,0\n");
    CHECK_THROWS_AS(pipeline::read_simulation_csv(gap), FormatError);
    std::istringstream regime("model_year,hour_of_year,hm0_m,tm02_s,regime\n1,0,1.0,5.0,3\n");
    CHECK_THROWS_AS(pipeline::read_simulation_csv(regime), FormatError);
}

TEST_CASE("model file round trip is exact") {
    const auto& m = truth();
    const auto text = pipeline::model_to_json(m);
    const auto back = pipeline::model_from_json(text);
    CHECK(pipeline::model_to_json(back) == text);
    CHECK(pipeline::model_fingerprint(back) == pipeline::model_fingerprint(m));
    const auto a = pipeline::simulate(m, 1, 8).series;
    const auto b = pipeline::simulate(back, 1, 8).series;
    CHECK(a.hm0 == b.hm0);
    CHECK(a.tm02 == b.tm02);

    const auto path = std::filesystem::temp_directory_path() / "wavesim_pipeline_model.json";
    pipeline::save_model(m, path);
    CHECK(pipeline::model_to_json(pipeline::load_model(path)) == text);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(pipeline::load_model(path), IoError);
}

TEST_CASE("edited model files are rejected") {
    const auto doc = json::parse(pipeline::model_to_json(truth()));

    auto edited = doc;
    edited["body"]["arma"]["hm0"]["ar"] = {1.2};
    CHECK_THROWS_AS(pipeline::model_from_json(edited.dump()), SchemaError);
    CHECK_THROWS_AS(pipeline::model_from_json(resign(edited)), DomainError);

    edited = doc;
    edited["body"].erase("renewal");
    try {
        pipeline::model_from_json(resign(edited));
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("renewal") != std::string::npos);
    }

    edited = doc;
    edited["schema_version"] = 99;
    CHECK_THROWS_AS(pipeline::model_from_json(edited.dump()), SchemaError);
    CHECK_THROWS_AS(pipeline::model_from_json("{not json"), SchemaError);
    CHECK_THROWS_AS(pipeline::model_from_json("{\"format\": \"other\"}"), SchemaError);
}

TEST_CASE("fit on a short synthetic record") {
    const auto record = testing::synthetic_record(4, 21);
    const auto result = pipeline::fit_all(record, RunConfig{});
    const auto& m = result.model;
    CHECK_NOTHROW(m.validate());
    CHECK(m.provenance.years == 4);
    CHECK(m.provenance.origin_year == 2003);
    CHECK(result.diagnostics.fourier_r2.size() == 4);
    CHECK(std::abs(m.steepness.a - testing::kSteepA) < 0.01);
    CHECK(m.hm0_arma.p() == 3);
    CHECK(m.tm02_arma.p() == 3);
    CHECK(m.tm02_arma.q() == 2);
    CHECK(std::abs(m.hm0_arma.ar[0] - testing::hm0_arma_truth().ar[0]) < 0.1);

    const auto diag = json::parse(pipeline::diagnostics_to_json(result));
    CHECK(diag["model_hash"] == pipeline::model_fingerprint(m));
    CHECK(diag["residuals"].size() == 2);
    CHECK(diag["renewal"]["by_season"].size() == 4);

    const auto sim = pipeline::simulate(m, 1, 4).series;
    CHECK(sim.size() == kYear);
    CHECK(*std::max_element(sim.hm0.begin(), sim.hm0.end()) <= m.hm0_cdf.max());
}

}
