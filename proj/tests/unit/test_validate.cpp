#include <doctest.h>

#include <wavesim/calendar.hpp>
#include <wavesim/error.hpp>
#include <wavesim/rng.hpp>
#include <wavesim/validate.hpp>

#include "truth_model.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <numeric>

using namespace wavesim;
using namespace wavesim::validate;

namespace {

constexpr std::size_t kYear = static_cast<std::size_t>(kHoursPerYear);

std::int64_t tiled_hours(const StormStatistics& s) {
    const auto d = s.durations();
    return std::accumulate(d.begin(), d.end(), std::int64_t{0}) +
           std::accumulate(s.interarrivals.begin(), s.interarrivals.end(), std::int64_t{0}) + s.boundary_hours +
           s.missing_hours;
}

const ingest::HourlySeries& record() {
    static const auto r = testing::synthetic_record(3, 17);
    return r;
}

struct Box {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
};

Box bounds(const std::vector<Polyline>& lines) {
    Box b;
    for (const auto& l : lines) {
        for (const auto& p : l) {
            b.x0 = std::min(b.x0, p[0]);
            b.x1 = std::max(b.x1, p[0]);
            b.y0 = std::min(b.y0, p[1]);
            b.y1 = std::max(b.y1, p[1]);
        }
    }
    return b;
}

} // namespace

TEST_SUITE("validate") {

TEST_CASE("storm extraction by hand") {
    const std::vector<double> h{1, 3, 3, 1, 3};
    const std::vector<double> t(5, 10.0);
    const auto s = extract_storms(h, t, {0.9, 2.0, 5.0});
    CHECK(s.durations() == std::vector<std::int64_t>{2, 1});
    CHECK(s.interarrivals == std::vector<std::int64_t>{1});
    CHECK(s.boundary_hours == 1);
    CHECK(s.missing_hours == 0);
    REQUIRE(s.events.size() == 2);
    CHECK(s.events[0].start == 1);
    CHECK(s.events[0].peak_hm0 == 3.0);
    CHECK(tiled_hours(s) == 5);
}

TEST_CASE("both thresholds must be exceeded and missing hours break calm runs") {
    const double nan = std::nan("");
    const std::vector<double> h{3, 3, 1, 3, nan, 1, 3, 3};
    const std::vector<double> t{6, 4, 6, 6, 6, 6, 6, 6};
    const auto s = extract_storms(h, t, {0.9, 2.0, 5.0});
    CHECK(s.durations() == std::vector<std::int64_t>{1, 1, 2});
    CHECK(s.interarrivals == std::vector<std::int64_t>{2});
    CHECK(s.missing_hours == 1);
    CHECK(s.boundary_hours == 1);
    CHECK(tiled_hours(s) == 8);
}

TEST_CASE("tiling on a long series") {
    const auto& r = record();
    for (double q : {0.8, 0.95, 0.99}) {
        const auto th = thresholds_from_quantile(r.hm0, r.tm02, q);
        CHECK(tiled_hours(extract_storms(r.hm0, r.tm02, th)) == static_cast<std::int64_t>(r.size()));
    }
}

TEST_CASE("threshold quantiles are type 7") {
    const std::vector<double> h{1, 2, 3, 4, 5};
    const std::vector<double> t{10, 20, std::nan(""), 40, 50};
    const auto th = thresholds_from_quantile(h, t, 0.5);
    CHECK(th.h_star == 3.0);
    CHECK(th.t_star == 30.0);
    CHECK(thresholds_from_quantile(h, t, 0.9).h_star == doctest::Approx(4.6));
    CHECK_THROWS_AS((StormThresholds{0.5, 0.0, 3.0}.validate()), DomainError);
}

TEST_CASE("storm counts fall as the threshold rises") {
    const auto& r = record();
    std::size_t previous = std::numeric_limits<std::size_t>::max();
    for (double q : {0.8, 0.9, 0.95, 0.965, 0.975, 0.99}) {
        const auto th = thresholds_from_quantile(r.hm0, r.tm02, q);
        const auto band = storm_count_band(r.hm0, r.tm02, 1, th);
        REQUIRE(band.counts.size() == 3);
        const auto total = std::accumulate(band.counts.begin(), band.counts.end(), std::size_t{0});
        CHECK(total <= previous);
        previous = total;
        CHECK(band.q05 <= band.q95);
    }
    const auto th = thresholds_from_quantile(r.hm0, r.tm02, 0.9);
    CHECK_THROWS_AS(storm_count_band(r.hm0, r.tm02, 2, th), SizeError);
}

TEST_CASE("season percentages") {
    const auto seasons = SeasonBoundaries::meteorological();
    std::vector<std::int8_t> sw(2 * kYear, 1);
    auto p = season_percentages(sw, seasons);
    REQUIRE(p.size() == 2);
    for (double v : p[1]) {
        CHECK(v == 1.0);
    }
    std::vector<std::int8_t> alt(kYear);
    for (std::size_t i = 0; i < kYear; ++i) {
        alt[i] = static_cast<std::int8_t>(i % 2);
    }
    p = season_percentages(alt, seasons);
    for (double v : p[0]) {
        CHECK(v == doctest::Approx(0.5));
    }
    std::vector<std::int8_t> gap(kYear, 0);
    for (std::size_t i = 0; i < kYear; ++i) {
        if (seasons.season_of(static_cast<std::int64_t>(i)) == Season::summer) {
            gap[i] = -1;
        }
    }
    p = season_percentages(gap, seasons);
    CHECK(std::isnan(p[0][static_cast<std::size_t>(Season::summer)]));
    CHECK(p[0][static_cast<std::size_t>(Season::winter)] == 0.0);
    CHECK_THROWS_AS(season_percentages(std::span(gap).first(100), seasons), SizeError);
}

TEST_CASE("gridded kde agrees with direct evaluation") {
    Rng rng(3);
    std::vector<double> x(4000);
    std::vector<double> y(4000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.normal();
        y[i] = 0.5 * x[i] + rng.normal();
    }
    std::vector<double> gx(81);
    std::vector<double> gy(81);
    for (std::size_t i = 0; i < 81; ++i) {
        gx[i] = -5.0 + 0.125 * static_cast<double>(i);
        gy[i] = -6.0 + 0.15 * static_cast<double>(i);
    }
    const double bx = 0.3;
    const double by = 0.35;
    const auto d = kde_2d(x, y, gx, gy, bx, by);
    double mass = 0.0;
    for (double v : d.values) {
        mass += v;
    }
    CHECK(mass * 0.125 * 0.15 == doctest::Approx(1.0).epsilon(0.01));
    for (std::size_t ix : {30u, 40u, 52u}) {
        for (std::size_t iy : {35u, 40u, 47u}) {
            double direct = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) {
                const double a = (gx[ix] - x[k]) / bx;
                const double b = (gy[iy] - y[k]) / by;
                direct += std::exp(-0.5 * (a * a + b * b));
            }
            direct /= static_cast<double>(x.size()) * 2.0 * std::numbers::pi * bx * by;
            CHECK(d.at(ix, iy) == doctest::Approx(direct).epsilon(0.03));
        }
    }
}

TEST_CASE("contours of a unimodal density are nested") {
    Rng rng(4);
    std::vector<double> x(5000);
    std::vector<double> y(5000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.normal();
        y[i] = rng.normal();
    }
    std::vector<double> g(65);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = -4.0 + 0.125 * static_cast<double>(i);
    }
    const auto d = kde_2d(x, y, g, g, 0.3, 0.3);
    const auto outer = contour_lines(d, 0.02);
    const auto inner = contour_lines(d, 0.1);
    REQUIRE_FALSE(outer.empty());
    REQUIRE_FALSE(inner.empty());
    const auto bo = bounds(outer);
    const auto bi = bounds(inner);
    CHECK(bo.x0 < bi.x0);
    CHECK(bo.x1 > bi.x1);
    CHECK(bo.y0 < bi.y0);
    CHECK(bo.y1 > bi.y1);
    // a closed ring around the mode
    const auto& ring = inner.front();
    CHECK(ring.front() == ring.back());
    CHECK(contour_lines(d, 10.0).empty());
}

TEST_CASE("contour of a bilinear field is exact") {
    Density2D d;
    d.x_grid = {0.0, 1.0, 2.0};
    d.y_grid = {0.0, 1.0};
    d.values = {0.0, 1.0, 2.0, 0.0, 1.0, 2.0};
    const auto lines = contour_lines(d, 0.5);
    REQUIRE(lines.size() == 1);
    for (const auto& p : lines[0]) {
        CHECK(p[0] == doctest::Approx(0.5));
    }
}

TEST_CASE("duration summary") {
    const std::vector<std::int64_t> v{1, 1, 2, 5, 40, 2000};
    const auto s = summarize_durations(v);
    CHECK(s.count == 6);
    CHECK(s.mean == doctest::Approx(2049.0 / 6.0));
    CHECK(s.median == doctest::Approx(3.5));
    REQUIRE(s.histogram.size() == kDurationBinEdges.size());
    CHECK(s.histogram[0] == doctest::Approx(2.0 / 6.0));
    CHECK(s.histogram.back() == doctest::Approx(1.0 / 6.0));
    CHECK(std::accumulate(s.histogram.begin(), s.histogram.end(), 0.0) == doctest::Approx(1.0));
    CHECK(summarize_durations({}).count == 0);
}

TEST_CASE("identical observed and simulated series") {
    const auto& r = record();
    ValidationOptions opt;
    opt.window_years = 1;
    opt.density.max_simulated_years = 3;
    const auto rep = validate_series(r, r, SeasonBoundaries::meteorological(), opt);
    CHECK(rep.observed_years == 3);
    CHECK(rep.window_years == 1);
    REQUIRE(rep.storms.size() == 6);
    for (const auto& b : rep.storms) {
        CHECK(b.duration_ks_p == doctest::Approx(1.0));
        CHECK(b.interarrival_ks_p == doctest::Approx(1.0));
        CHECK(b.simulated_band.counts.size() == 3);
    }
    for (double p : rep.percentage_ks_p) {
        CHECK(p == doctest::Approx(1.0));
    }
    REQUIRE(rep.densities.curves.size() == 9);
    for (const auto& c : rep.densities.curves) {
        CHECK(c.coverage == 1.0);
        CHECK(c.observed_years.size() == 3);
    }
    for (const auto& c : rep.densities.contours) {
        CHECK(c.observed.size() == c.simulated.size());
    }

    const auto doc = nlohmann::json::parse(report_to_json(rep));
    CHECK(doc["schema_version"] == kReportSchemaVersion);
    CHECK(doc["storms"]["thresholds"].size() == 6);
    CHECK(doc["percentages"]["observed"].contains("winter"));
    CHECK(doc["densities"]["curves"].size() == 9);
    CHECK_FALSE(doc.contains("config"));
    const RunConfig cfg;
    CHECK(nlohmann::json::parse(report_to_json(rep, &cfg)).contains("config"));
}

TEST_CASE("observed counts are scaled to the window") {
    const auto& r = record();
    ValidationOptions opt;
    opt.quantiles = {0.9};
    opt.window_years = 1;
    const auto rep = validate_series(r, r, SeasonBoundaries::meteorological(), opt);
    const auto th = thresholds_from_quantile(r.hm0, r.tm02, 0.9);
    const auto n = extract_storms(r.hm0, r.tm02, th).events.size();
    const auto& b = rep.storms[0];
    CHECK(b.observed_count == n);
    const double scaled = static_cast<double>(n) / 3.0;
    CHECK(b.observed_in_band == (scaled >= b.simulated_band.q05 && scaled <= b.simulated_band.q95));
}

}
