#include "truth_model.hpp"

#include <wavesim/rng.hpp>
#include <wavesim/version.hpp>

#include <cmath>

namespace wavesim::testing {

arma::ArmaModel hm0_arma_truth() {
    arma::ArmaModel m;
    m.ar = {1.07, 0.10, -0.18};
    m.sigma2 = 0.165 * 0.165;
    m.standard_errors.assign(4, 0.0);
    return m;
}

arma::ArmaModel tm02_arma_truth() {
    arma::ArmaModel m;
    m.ar = {2.63, -2.54, 0.89};
    m.ma = {-1.62, 0.83};
    m.sigma2 = 0.39 * 0.39;
    m.standard_errors.assign(6, 0.0);
    return m;
}

seasonal::CoefficientModel coefficient_truth() {
    using seasonal::coefficient_index;
    using seasonal::Process;
    seasonal::CoefficientModel c;
    const double table[4][5][2] = {
        {{0.0, 0.09}, {0.39, 0.09}, {-0.10, 0.12}, {0.03, 0.08}, {-0.03, 0.10}}, // mu hm0
        {{0.91, 0.05}, {0.01, 0.05}, {0.0, 0.06}, {-0.01, 0.03}, {0.01, 0.05}},  // sigma hm0
        {{0.0, 0.10}, {-0.21, 0.06}, {0.14, 0.10}, {-0.03, 0.04}, {0.0, 0.07}},  // mu tm02
        {{0.96, 0.04}, {0.0, 0.04}, {0.03, 0.03}, {-0.01, 0.02}, {0.0, 0.03}},   // sigma tm02
    };
    for (int p = 0; p < 4; ++p) {
        for (int k = 0; k < 5; ++k) {
            const auto i = static_cast<std::size_t>(coefficient_index(p, k));
            c.mean[i] = table[p][k][0];
            c.sd[i] = table[p][k][1];
        }
    }
    c.correlations = {
        {coefficient_index(Process::kSigmaHm0, 0), coefficient_index(Process::kSigmaTm02, 0), -0.7},
        {coefficient_index(Process::kMuTm02, 1), coefficient_index(Process::kSigmaTm02, 1), 0.6},
        {coefficient_index(Process::kMuHm0, 2), coefficient_index(Process::kMuTm02, 2), -0.5},
    };
    return c;
}

residuals::ResidualModel residual_truth() {
    residuals::ResidualModel r;
    r.regimes[0] = {{-0.01, 0.16, 1.07, 4.80}, {0.05, 0.35, 0.87, 5.58}, {copula::Family::student_t, 0, -0.09, 5.53}};
    r.regimes[1] = {{0.01, 0.17, 1.13, 5.36}, {-0.04, 0.43, 0.90, 5.52}, {copula::Family::student_t, 0, -0.23, 6.36}};
    return r;
}

namespace {

std::vector<std::int64_t> lognormal_durations(Rng& rng, double median, double log_sd, std::size_t n) {
    std::vector<std::int64_t> out(n);
    for (auto& d : out) {
        d = std::max<std::int64_t>(1, std::llround(median * std::exp(log_sd * rng.normal())));
    }
    return out;
}

} // namespace

renewal::RenewalModel renewal_truth(std::uint64_t seed) {
    using copula::Family;
    auto rng = Rng::stream(seed, "truth/durations");
    renewal::RenewalModel m;
    // medians (hours) of north and southwest runs per season: spring has the
    // largest southwest share, autumn the smallest
    const double medians[4][2] = {{14.0, 30.0}, {16.0, 24.0}, {22.0, 18.0}, {16.0, 22.0}};
    const copula::CopulaSpec ns[4] = {{Family::bb8, 0, 1.86, 0.68},
                                      {Family::bb8, 0, 1.52, 0.81},
                                      {Family::frank, 0, 1.77, 0.0},
                                      {Family::bb8, 180, 2.74, 0.59}};
    const copula::CopulaSpec sn[4] = {{Family::frank, 0, 0.72, 0.0},
                                      {Family::bb8, 0, 1.41, 0.85},
                                      {Family::frank, 0, 0.99, 0.0},
                                      {Family::frank, 0, 1.02, 0.0}};
    for (std::size_t s = 0; s < 4; ++s) {
        auto& sm = m.by_season[s];
        sm.north = renewal::DurationMargin(lognormal_durations(rng, medians[s][0], 0.9, 4000));
        sm.southwest = renewal::DurationMargin(lognormal_durations(rng, medians[s][1], 0.9, 4000));
        sm.north_then_southwest = ns[s];
        sm.southwest_then_north = sn[s];
    }
    return m;
}

pipeline::FittedModel truth_model(std::uint64_t seed) {
    pipeline::FittedModel m;
    m.steepness = {kSteepA, kSteepB, kSteepC, 1.0, 0.0};
    auto rng = Rng::stream(seed, "truth/margins");
    std::vector<double> h(60000);
    std::vector<double> t(60000);
    for (auto& v : h) {
        v = 0.05 + 0.52 * rng.gamma(2.5);
    }
    for (auto& v : t) {
        v = 0.45 * rng.gamma(2.2);
    }
    m.hm0_cdf = stats::EmpiricalCdf(std::move(h));
    m.tm02_detrended_cdf = stats::EmpiricalCdf(std::move(t));
    m.coefficients = coefficient_truth();
    m.hm0_arma = hm0_arma_truth();
    m.tm02_arma = tm02_arma_truth();
    m.residuals = residual_truth();
    m.renewal = renewal_truth(seed);
    m.provenance = {"truth", 2003, 0, std::string(library_version()), "1970-01-01T00:00:00Z"};
    m.validate();
    return m;
}

ingest::HourlySeries synthetic_record(std::size_t years, std::uint64_t seed) {
    static const auto model = truth_model();
    auto series = pipeline::simulate(model, years, seed).series;
    series.origin_year = 2003;
    series.source_id = "synthetic";
    return series;
}

} // namespace wavesim::testing
