#include <doctest.h>

#include <wavesim/error.hpp>
#include <wavesim/rng.hpp>
#include <wavesim/steepness.hpp>

#include <cmath>

using namespace wavesim;
using steepness::SteepnessCurve;

namespace {

const SteepnessCurve kCurve{0.0782, 9.994, 0.07674};

steepness::BinnedMaxima curve_points(const SteepnessCurve& c, double noise, std::uint64_t seed) {
    Rng rng(seed);
    steepness::BinnedMaxima pts;
    for (int i = 0; i < 108; ++i) {
        const double h = 0.1 + 6.0 * i / 107.0;
        pts.push_back({h, c.s_max(h) * (1.0 + noise * rng.normal()), 100});
    }
    return pts;
}

} // namespace

TEST_SUITE("steepness") {

TEST_CASE("desk values") {
    CHECK(steepness::steepness(3.19, 6.1) == doctest::Approx(0.0549).epsilon(1e-3));
    CHECK(steepness::steepness(1.0, 10.0) == doctest::Approx(0.00640).epsilon(2e-3));
    CHECK(steepness::steepness(0.0, 7.0) == 0.0);
    CHECK(kCurve.s_max(3.19) == doctest::Approx(0.0761).epsilon(1e-3));
    CHECK(kCurve.t_min(3.19) == doctest::Approx(5.18).epsilon(1e-3));
    CHECK(*steepness::detrend_period(kCurve, 3.19, 6.1) == doctest::Approx(0.92).epsilon(0.01));
}

TEST_CASE("limit curve identities") {
    CHECK(kCurve.s_max(kCurve.b) == kCurve.a);
    CHECK(kCurve.s_max(0.5) < kCurve.s_max(3.0));
    for (double h : {0.05, 0.3, 1.0, 3.19, 7.5}) {
        CHECK(steepness::steepness(h, kCurve.t_min(h)) == doctest::Approx(kCurve.s_max(h)).epsilon(1e-14));
    }
}

TEST_CASE("minimum period grows without bound as height vanishes") {
    // s_max(h) decays faster than h, so t_min diverges.
    double prev = kCurve.t_min(0.5);
    for (double h : {0.2, 0.1, 0.05, 0.02}) {
        const double t = kCurve.t_min(h);
        CHECK(t > prev);
        prev = t;
    }
    CHECK_THROWS_AS(kCurve.s_max(0.0), DomainError);
}

TEST_CASE("detrend and restore are inverse") {
    CHECK(*steepness::detrend_period(kCurve, 2.0, kCurve.t_min(2.0)) == 0.0);
    for (double h : {0.3, 1.2, 4.0}) {
        for (double extra : {0.0, 0.4, 3.0}) {
            const double t = kCurve.t_min(h) + extra;
            const double back = steepness::restore_period(kCurve, h, *steepness::detrend_period(kCurve, h, t));
            CHECK(back == doctest::Approx(t).epsilon(1e-14));
        }
    }
    CHECK_FALSE(steepness::detrend_period(kCurve, 3.0, 4.0).has_value());
    CHECK_THROWS_AS(steepness::restore_period(kCurve, 1.0, -0.1), DomainError);
}

TEST_CASE("equal-count bins") {
    std::vector<double> h{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<double> t(10, 8.0);
    const auto bins = steepness::bin_max_steepness(h, t, 2);
    REQUIRE(bins.size() == 2);
    CHECK(bins[0].count == 5);
    CHECK(bins[1].count == 5);
    CHECK(bins[0].h_center == doctest::Approx(3.0));
    CHECK(bins[1].s_max_observed == doctest::Approx(steepness::steepness(10, 8)));
    std::vector<double> same(10, 2.0);
    CHECK_THROWS_AS(steepness::bin_max_steepness(same, t, 2), SizeError);
}

TEST_CASE("108 bins over a full record give 1870 points per bin") {
    const std::size_t n = 201960;
    std::vector<double> h(n);
    std::vector<double> t(n, 6.0);
    for (std::size_t i = 0; i < n; ++i) {
        h[i] = 0.1 + static_cast<double>(i % 9973) * 1e-3;
    }
    const auto bins = steepness::bin_max_steepness(h, t, 108);
    REQUIRE(bins.size() == 108);
    for (const auto& b : bins) {
        CHECK(b.count == 1870);
    }
}

TEST_CASE("noise-free fit recovers parameters within 1 percent") {
    const auto fit = steepness::fit_limit_curve(curve_points(kCurve, 0.0, 1), 10.0);
    CHECK(fit.a == doctest::Approx(kCurve.a).epsilon(0.01));
    CHECK(fit.b == doctest::Approx(kCurve.b).epsilon(0.01));
    CHECK(fit.c == doctest::Approx(kCurve.c).epsilon(0.01));
}

TEST_CASE("noisy fit recovers parameters within 5 percent") {
    const auto fit = steepness::fit_limit_curve(curve_points(kCurve, 0.002, 2), 10.0);
    CHECK(fit.a == doctest::Approx(kCurve.a).epsilon(0.05));
    CHECK(fit.c == doctest::Approx(kCurve.c).epsilon(0.05));
    CHECK(fit.b <= 10.0);
}

TEST_CASE("two points cannot be fitted") {
    steepness::BinnedMaxima pts{{1.0, 0.05, 10}, {2.0, 0.06, 10}};
    CHECK_THROWS_AS(steepness::fit_limit_curve(pts, 10.0), FitError);
}

TEST_CASE("anomalies") {
    ingest::HourlySeries s;
    s.hm0 = {2.0, 2.0, 1.0, 0.0};
    s.tm02 = {kCurve.t_min(2.0), kCurve.t_min(2.0) * 0.9, 6.0, 5.0};
    s.regime = {0, 0, 0, 0};
    CHECK(steepness::flag_anomalies(s, kCurve) == 2);
    CHECK_FALSE(s.hm0_missing(0));
    CHECK(s.hm0_missing(1));
    CHECK(s.tm02_missing(1));
    CHECK_FALSE(s.hm0_missing(2));
    CHECK(s.hm0_missing(3));

    ingest::HourlySeries ok;
    ok.hm0 = {0.5, 1.5, 3.0};
    ok.tm02 = {9.0, 9.0, 9.0};
    ok.regime = {0, 1, 0};
    CHECK(steepness::flag_anomalies(ok, kCurve) == 0);
}

}
