#include <doctest.h>

#include <wavesim/calendar.hpp>
#include <wavesim/error.hpp>
#include <wavesim/numeric.hpp>
#include <wavesim/rng.hpp>
#include <wavesim/seasonal.hpp>
#include <wavesim/stats.hpp>

#include <cmath>
#include <numbers>

using namespace wavesim;
using namespace wavesim::seasonal;

namespace {

constexpr std::size_t kYear = static_cast<std::size_t>(kHoursPerYear);
constexpr double kOmega = 2.0 * std::numbers::pi / static_cast<double>(kHoursPerYear);

// Continuous Epanechnikov transfer function at frequency w for half-width h.
double kernel_gain(double w, double h) {
    const double x = w * h;
    return 3.0 * (std::sin(x) - x * std::cos(x)) / (x * x * x);
}

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (double& x : out) {
        x = rng.normal();
    }
    return out;
}

} // namespace

TEST_SUITE("seasonal") {

TEST_CASE("kernel") {
    CHECK(epanechnikov(0.0) == 0.75);
    CHECK(epanechnikov(1.0) == 0.0);
    CHECK(epanechnikov(-1.0) == 0.0);
    CHECK(epanechnikov(1.5) == 0.0);
    CHECK(epanechnikov(0.5) == doctest::Approx(0.5625));
}

TEST_CASE("argument checks") {
    std::vector<double> y(100, 1.0);
    CHECK_THROWS_AS(smooth_mean(y, 1), DomainError);
    CHECK_THROWS_AS(smooth_mean(y, 100), SizeError);
    CHECK_NOTHROW(smooth_mean(y, 99));
}

TEST_CASE("constant series") {
    std::vector<double> y(3000, 3.0);
    for (double m : smooth_mean(y, 720)) {
        CHECK(m == doctest::Approx(3.0));
    }
    const auto mu = smooth_mean(y, 720);
    for (double s : smooth_std(y, mu, 720)) {
        CHECK(s == kSigmaFloor);
    }
}

TEST_CASE("missing values are skipped and a fully missing window stays missing") {
    std::vector<double> y(2000, 2.0);
    for (std::size_t i = 500; i < 520; ++i) {
        y[i] = std::nan("");
    }
    for (std::size_t i = 1000; i < 1200; ++i) {
        y[i] = std::nan("");
    }
    const auto mu = smooth_mean(y, 40);
    CHECK(mu[510] == doctest::Approx(2.0));
    CHECK(std::isnan(mu[1100]));
    CHECK(mu[1000] == doctest::Approx(2.0));
}

TEST_CASE("annual cosine is attenuated by the analytic kernel gain") {
    std::vector<double> y(3 * kYear);
    for (std::size_t t = 0; t < y.size(); ++t) {
        y[t] = std::cos(kOmega * static_cast<double>(t));
    }
    const auto mu = smooth_mean(y, 720);
    const double gain = kernel_gain(kOmega, 360.0);
    CHECK(gain > 0.98);
    for (std::size_t t = kYear; t < 2 * kYear; t += 97) {
        CHECK(std::abs(mu[t] - gain * y[t]) < 1e-4);
    }
}

TEST_CASE("white noise has unit local sd away from the edges") {
    const auto y = normals(100000, 3);
    const auto mu = smooth_mean(y, 720);
    const auto sd = smooth_std(y, mu, 720);
    for (std::size_t t = 720; t + 720 < y.size(); t += 50) {
        CHECK(std::abs(sd[t] - 1.0) < 0.1);
    }
}

TEST_CASE("variance step is tracked within one bandwidth") {
    auto y = normals(20000, 4);
    for (std::size_t t = 10000; t < y.size(); ++t) {
        y[t] *= 2.0;
    }
    const auto mu = smooth_mean(y, 720);
    const auto sd = smooth_std(y, mu, 720);
    for (std::size_t t = 2000; t < 9640; t += 100) {
        CHECK(std::abs(sd[t] - 1.0) < 0.15);
    }
    for (std::size_t t = 10360; t < 18000; t += 100) {
        CHECK(std::abs(sd[t] - 2.0) < 0.3);
    }
}

TEST_CASE("standardize and destandardize are exact inverses") {
    const auto y = normals(5000, 5);
    std::vector<double> mu(y.size());
    std::vector<double> sigma(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        mu[i] = std::sin(0.01 * static_cast<double>(i));
        sigma[i] = 0.5 + 0.25 * std::cos(0.003 * static_cast<double>(i));
    }
    const auto z = standardize(y, mu, sigma);
    const auto back = destandardize(z, mu, sigma);
    for (std::size_t i = 0; i < y.size(); ++i) {
        CHECK(back[i] == doctest::Approx(y[i]).epsilon(1e-14));
    }
    const auto zero = standardize(mu, mu, sigma);
    for (double v : zero) {
        CHECK(v == 0.0);
    }
    CHECK_THROWS_AS(standardize(y, std::span(mu).first(10), sigma), SizeError);
}

TEST_CASE("decomposition of a seasonal process gives near-standard z") {
    const std::size_t n = 4 * kYear;
    auto y = normals(n, 6);
    for (std::size_t t = 0; t < n; ++t) {
        const double tt = static_cast<double>(t);
        y[t] = 0.3 * std::cos(kOmega * tt) + (0.8 + 0.2 * std::sin(kOmega * tt)) * y[t];
    }
    const auto mu = smooth_mean(y, 720);
    const auto sd = smooth_std(y, mu, 720);
    const auto z = standardize(y, mu, sd);
    CHECK(std::abs(stats::mean(z)) < 0.05);
    CHECK(std::abs(stats::stddev(z) - 1.0) < 0.1);
}

TEST_CASE("fourier fit recovers exact coefficients") {
    const FourierCoefficients truth{2.0, 1.0, 0.0, 0.0, 0.0};
    std::vector<double> seg(kYear);
    for (std::size_t t = 0; t < kYear; ++t) {
        seg[t] = 2.0 + std::cos(kOmega * static_cast<double>(t));
    }
    auto fit = fit_fourier_year(seg);
    for (int k = 0; k < 5; ++k) {
        CHECK(std::abs(fit.coefficients[static_cast<std::size_t>(k)] - truth[static_cast<std::size_t>(k)]) < 1e-8);
    }
    CHECK(fit.r_squared == doctest::Approx(1.0));

    for (std::size_t t = 0; t < kYear; ++t) {
        seg[t] = std::sin(2.0 * kOmega * static_cast<double>(t));
    }
    fit = fit_fourier_year(seg);
    CHECK(std::abs(fit.coefficients[4] - 1.0) < 1e-8);
    for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(fit.coefficients[static_cast<std::size_t>(k)]) < 1e-8);
    }

    const FourierCoefficients general{0.4, -0.3, 0.2, 0.05, -0.07};
    for (std::size_t t = 0; t < kYear; ++t) {
        seg[t] = t % 3 == 0 ? std::nan("") : fourier_eval(general, static_cast<double>(t));
    }
    fit = fit_fourier_year(seg);
    for (int k = 0; k < 5; ++k) {
        CHECK(std::abs(fit.coefficients[static_cast<std::size_t>(k)] - general[static_cast<std::size_t>(k)]) < 1e-8);
    }
}

TEST_CASE("fourier fit guards") {
    std::vector<double> seg(kYear, std::nan(""));
    CHECK_THROWS_AS(fit_fourier_year(seg), SizeError);
    for (std::size_t t = 0; t < 200; ++t) {
        seg[t * 40] = 1.0;
    }
    CHECK_NOTHROW(fit_fourier_year(seg));
    CHECK_THROWS_AS(fit_fourier_year(std::span(seg).first(100)), SizeError);
}

TEST_CASE("concat smooth with identical years is plain concatenation") {
    const std::vector<FourierCoefficients> years(3, FourierCoefficients{1.0, 0.5, -0.2, 0.1, 0.05});
    const auto out = concat_smooth(years);
    REQUIRE(out.size() == 3 * kYear);
    for (std::size_t t = 0; t < out.size(); t += 7) {
        CHECK(out[t] == doctest::Approx(fourier_eval(years[0], static_cast<double>(t % kYear))).epsilon(1e-12));
    }
}

TEST_CASE("concat smooth patches a step locally, monotone and C1") {
    const std::vector<FourierCoefficients> years{{0, 0, 0, 0, 0}, {1, 0, 0, 0, 0}};
    const auto out = concat_smooth(years, 72);
    for (std::size_t t = 0; t < kYear - 72; ++t) {
        REQUIRE(out[t] == 0.0);
    }
    for (std::size_t t = kYear + 72; t < 2 * kYear; ++t) {
        REQUIRE(out[t] == 1.0);
    }
    for (std::size_t t = kYear - 73; t < kYear + 73; ++t) {
        CHECK(out[t + 1] >= out[t]);
    }
    // slopes at the patch ends vanish to match the flat curves
    CHECK(out[kYear - 71] - out[kYear - 72] < 1e-3);
    CHECK(out[kYear + 72] - out[kYear + 71] < 1e-3);
    double max_jump = 0.0;
    for (std::size_t t = kYear - 80; t < kYear + 80; ++t) {
        max_jump = std::max(max_jump, out[t + 1] - out[t]);
    }
    CHECK(max_jump < 1.6 / 144.0);
}

TEST_CASE("coefficient names") {
    CHECK(coefficient_name(coefficient_index(kMuHm0, 1)) == "mu_hm0.a1");
    CHECK(coefficient_name(coefficient_index(kSigmaTm02, 0)) == "sigma_tm02.a0");
    for (int i = 0; i < kCoefficientCount; ++i) {
        CHECK(coefficient_from_name(coefficient_name(i)) == i);
    }
    CHECK_THROWS_AS(coefficient_from_name("mu_hm0.a5"), ConfigError);
}

TEST_CASE("sampled correlations and margins") {
    CoefficientModel model;
    for (int i = 0; i < kCoefficientCount; ++i) {
        model.mean[static_cast<std::size_t>(i)] = 0.1 * i;
        model.sd[static_cast<std::size_t>(i)] = 0.05 + 0.01 * i;
    }
    const int s_h0 = coefficient_index(kSigmaHm0, 0);
    const int s_t0 = coefficient_index(kSigmaTm02, 0);
    const int m_t1 = coefficient_index(kMuTm02, 1);
    const int s_t1 = coefficient_index(kSigmaTm02, 1);
    model.correlations = {{s_h0, s_t0, -0.7}, {m_t1, s_t1, 0.6}};
    CHECK_NOTHROW(model.validate());
    Rng rng(7);
    const auto draws = sample_coefficients(model, 10000, rng);
    auto column = [&](int i) {
        std::vector<double> c;
        for (const auto& d : draws) {
            c.push_back(d[static_cast<std::size_t>(i)]);
        }
        return c;
    };
    CHECK(std::abs(stats::pearson_correlation(column(s_h0), column(s_t0)) + 0.7) < 0.03);
    CHECK(std::abs(stats::pearson_correlation(column(m_t1), column(s_t1)) - 0.6) < 0.03);
    CHECK(std::abs(stats::pearson_correlation(column(0), column(1))) < 0.05);
    // per-column alpha split across the columns, plus one pooled test of the standardized draws
    std::vector<double> pooled;
    for (int i = 0; i < kCoefficientCount; ++i) {
        const double m = model.mean[static_cast<std::size_t>(i)];
        const double s = model.sd[static_cast<std::size_t>(i)];
        const auto col = column(i);
        CAPTURE(i);
        CHECK(stats::ks_one_sample(col, [&](double x) { return numeric::normal_cdf((x - m) / s); }).p_value >
              0.01 / kCoefficientCount);
        for (double x : col) {
            pooled.push_back((x - m) / s);
        }
    }
    CHECK(stats::ks_one_sample(pooled, [](double x) { return numeric::normal_cdf(x); }).p_value > 0.01);
}

TEST_CASE("model validation") {
    CoefficientModel model;
    model.sd.fill(1.0);
    model.correlations = {{0, 1, 0.9}, {1, 2, 0.9}, {0, 2, -0.9}};
    CHECK_THROWS_AS(model.validate(), DomainError);
    model.correlations = {{0, 0, 0.5}};
    CHECK_THROWS_AS(model.validate(), DomainError);
    model.correlations.clear();
    model.sd[3] = -1.0;
    CHECK_THROWS_AS(model.validate(), DomainError);
}

TEST_CASE("coefficient model fit recovers a strong correlation") {
    CoefficientModel truth;
    truth.sd.fill(1.0);
    const int a = coefficient_index(kSigmaHm0, 0);
    const int b = coefficient_index(kSigmaTm02, 0);
    truth.correlations = {{a, b, -0.7}};
    Rng rng(8);
    const auto years = sample_coefficients(truth, 200, rng);
    const auto fit = fit_coefficient_model(years);
    bool found = false;
    for (const auto& c : fit.correlations) {
        if ((c.i == a && c.j == b) || (c.i == b && c.j == a)) {
            found = true;
            CHECK(std::abs(c.rho + 0.7) < 0.1);
        }
    }
    CHECK(found);
    CHECK_NOTHROW(fit.validate());
    CHECK_THROWS_AS(fit_coefficient_model(std::span(years).first(2)), SizeError);
}

TEST_CASE("coefficient model null false-positive rate") {
    CoefficientModel truth;
    truth.sd.fill(1.0);
    Rng rng(9);
    const int reps = 200;
    const int tested_pairs = 5 * 6;
    int positives = 0;
    for (int r = 0; r < reps; ++r) {
        const auto years = sample_coefficients(truth, 24, rng);
        positives += static_cast<int>(fit_coefficient_model(years).correlations.size());
    }
    const double rate = static_cast<double>(positives) / (reps * tested_pairs);
    CAPTURE(rate);
    CHECK(rate < 0.07);
}

TEST_CASE("build seasonal series") {
    CoefficientVector flat{};
    flat[coefficient_index(kMuHm0, 0)] = 0.2;
    flat[coefficient_index(kSigmaHm0, 0)] = 0.8;
    const std::vector<CoefficientVector> two(2, flat);
    const auto pair = build_seasonal_series(two, Variable::hm0);
    REQUIRE(pair.mu.size() == 2 * kYear);
    for (std::size_t t = 0; t < pair.mu.size(); t += 11) {
        CHECK(pair.mu[t] == doctest::Approx(0.2));
        CHECK(pair.sigma[t] == doctest::Approx(0.8));
    }
    const auto tm = build_seasonal_series(two, Variable::tm02);
    CHECK(tm.mu[0] == 0.0);
    CHECK(tm.sigma[0] == kSigmaFloor);

    CoefficientVector cosine{};
    cosine[coefficient_index(kMuTm02, 1)] = 1.0;
    const std::vector<CoefficientVector> one(1, cosine);
    const auto c = build_seasonal_series(one, Variable::tm02);
    CHECK(std::max_element(c.mu.begin(), c.mu.end()) - c.mu.begin() == 0);
    const auto trough = static_cast<std::size_t>(std::min_element(c.mu.begin(), c.mu.end()) - c.mu.begin());
    CHECK((trough == kYear / 2 || trough == kYear / 2 + 1 || trough + 1 == kYear / 2));

    CoefficientVector rich{};
    rich[coefficient_index(kMuHm0, 1)] = 0.4;
    rich[coefficient_index(kMuHm0, 4)] = -0.1;
    rich[coefficient_index(kSigmaHm0, 0)] = 1.0;
    const std::vector<CoefficientVector> three(3, rich);
    const auto p = build_seasonal_series(three, Variable::hm0);
    const std::span<const double> first(p.mu.data(), 2 * kYear);
    const std::span<const double> shifted(p.mu.data() + kYear, 2 * kYear);
    CHECK(stats::pearson_correlation(first, shifted) > 0.99);
}

}
