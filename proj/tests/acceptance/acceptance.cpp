// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <wavesim/arma.hpp>
#include <wavesim/copula.hpp>
#include <wavesim/pipeline.hpp>
#include <wavesim/renewal.hpp>
#include <wavesim/rng.hpp>
#include <wavesim/seasonal.hpp>
#include <wavesim/stats.hpp>
#include <wavesim/steepness.hpp>
#include <wavesim/validate.hpp>

#include "truth_model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

using namespace wavesim;

namespace {

constexpr std::size_t kYear = static_cast<std::size_t>(kHoursPerYear);

struct Outcome {
    bool passed = true;
    std::vector<std::string> notes;

    void require(bool ok, std::string note) {
        if (!ok) {
            passed = false;
            note = "FAILED " + note;
        }
        notes.push_back(std::move(note));
    }
};

struct Criterion {
    std::string name;
    double time_limit_s;
    std::function<void(Outcome&)> body;
};

std::vector<double> normals(std::size_t n, Rng& rng, double sd = 1.0) {
    std::vector<double> out(n);
    for (double& x : out) {
        x = sd * rng.normal();
    }
    return out;
}

// ---- steepness ------------------------------------------------------------------

void steepness_recovery(Outcome& out) {
    const steepness::SteepnessCurve truth{testing::kSteepA, testing::kSteepB, testing::kSteepC, 0.0, 0.0};
    Rng rng(101);
    steepness::BinnedMaxima points(108);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double h = 0.15 + 5.5 * static_cast<double>(i) / 107.0;
        points[i] = {h, truth.s_max(h) * (1.0 + 0.01 * rng.normal()), 1870};
    }
    const auto fit = steepness::fit_limit_curve(points, 10.0);
    const double da = fit.a / truth.a - 1.0;
    const double dc = fit.c / truth.c - 1.0;
    out.require(std::abs(da) <= 0.02, fmt::format("a = {:.5f} ({:+.2f}% of truth, limit 2%)", fit.a, 100 * da));
    out.require(std::abs(dc) <= 0.10, fmt::format("c = {:.5f} ({:+.2f}% of truth, limit 10%)", fit.c, 100 * dc));
    out.require(fit.rmse <= 0.006, fmt::format("rmse = {:.5f} (limit 0.006)", fit.rmse));
}

// ---- arma -----------------------------------------------------------------------------

void arma_round_trip(Outcome& out) {
    Rng rng(202);
    for (const auto& [name, truth] : {std::pair{"hm0", testing::hm0_arma_truth()},
                                      std::pair{"tm02", testing::tm02_arma_truth()}}) {
        const auto z = arma::simulate_arma(truth, normals(100000 + 2000, rng, std::sqrt(truth.sigma2)), 2000);
        const auto fit = arma::fit_arma(z, truth.p(), truth.q());
        double worst = 0.0;
        for (std::size_t j = 0; j < truth.ar.size(); ++j) {
            worst = std::max(worst, std::abs(fit.ar[j] - truth.ar[j]));
        }
        for (std::size_t j = 0; j < truth.ma.size(); ++j) {
            worst = std::max(worst, std::abs(fit.ma[j] - truth.ma[j]));
        }
        out.require(worst <= 0.05, fmt::format("{}: largest coefficient error {:.4f} (limit 0.05)", name, worst));
        out.require(arma::is_stationary(fit.ar) && arma::is_invertible(fit.ma),
                    fmt::format("{}: fitted model stationary and invertible", name));
    }
}

// ---- copula ------------------------------------------------------------------------------

struct UvSample {
    std::vector<double> u;
    std::vector<double> v;
};

UvSample sample(const copula::CopulaSpec& c, std::size_t n, Rng& rng) {
    UvSample s;
    for (const auto& p : copula::copula_sample(c, n, rng)) {
        s.u.push_back(p.u);
        s.v.push_back(p.v);
    }
    return s;
}

bool same_class(const copula::CopulaSpec& a, const copula::CopulaSpec& b) {
    return a.family == b.family;
}

void copula_targets(Outcome& out) {
    using copula::Family;
    Rng rng(303);
    const copula::CopulaSpec frank{Family::frank, 0, 1.77, 0.0};
    const copula::CopulaSpec t{Family::student_t, 0, -0.23, 6.36};
    const auto fs = sample(frank, 100000, rng);
    const double tf = stats::kendall_tau(fs.u, fs.v);
    out.require(std::abs(tf - 0.19) <= 0.01, fmt::format("Frank(1.77) tau = {:.4f} (0.19 +- 0.01)", tf));
    const auto ts = sample(t, 100000, rng);
    const double tt = stats::kendall_tau(ts.u, ts.v);
    out.require(std::abs(tt + 0.148) <= 0.01, fmt::format("t(-0.23, 6.36) tau = {:.4f} (-0.148 +- 0.01)", tt));

    for (const auto& generator : {t, frank}) {
        int hits = 0;
        for (int r = 0; r < 50; ++r) {
            const auto s = sample(generator, 5000, rng);
            const auto u = stats::pseudo_observations(s.u);
            const auto v = stats::pseudo_observations(s.v);
            hits += same_class(copula::select_copula(u, v, copula::kAllFamilies).best.spec, generator) ? 1 : 0;
        }
        out.require(hits >= 40, fmt::format("{} selected in {}/50 replicates (need 40)", generator.describe(), hits));
    }
}

// ---- renewal -------------------------------------------------------------------------------

std::array<double, 4> mean_percentages(std::span<const std::int8_t> regimes, const SeasonBoundaries& seasons) {
    std::array<double, 4> sw{};
    std::array<double, 4> all{};
    for (std::size_t i = 0; i < regimes.size(); ++i) {
        const auto s = static_cast<std::size_t>(seasons.season_of(static_cast<std::int64_t>(i % kYear)));
        all[s] += 1.0;
        sw[s] += regimes[i] == ingest::kRegimeSouthwest ? 1.0 : 0.0;
    }
    for (std::size_t s = 0; s < 4; ++s) {
        sw[s] /= all[s];
    }
    return sw;
}

void renewal_fidelity(Outcome& out) {
    const auto truth = testing::renewal_truth();
    const auto& seasons = truth.seasons;
    Rng long_rng(404);
    const auto long_run = renewal::simulate_regimes(truth, 500 * kHoursPerYear, 0, long_rng);
    const auto true_pct = mean_percentages(long_run, seasons);
    out.notes.push_back(fmt::format("true SW share spring {:.3f} summer {:.3f} autumn {:.3f} winter {:.3f}",
                                    true_pct[0], true_pct[1], true_pct[2], true_pct[3]));

    const int meta = 20;
    int contained = 0;
    for (int m = 0; m < meta; ++m) {
        Rng rng = Rng::stream(405, fmt::format("meta/{}", m));
        const auto observed = renewal::simulate_regimes(truth, 12 * kHoursPerYear, 0, rng);
        const auto fit = renewal::fit_renewal(renewal::extract_durations(observed, seasons), seasons);
        const auto simulated = renewal::simulate_regimes(fit.model, 100 * kHoursPerYear, 0, rng);
        const auto yearly = validate::season_percentages(simulated, seasons);
        bool all_in = true;
        for (std::size_t s = 0; s < 4; ++s) {
            std::vector<double> col;
            for (const auto& row : yearly) {
                col.push_back(row[s]);
            }
            const double lo = stats::sample_quantile(col, 0.05);
            const double hi = stats::sample_quantile(col, 0.95);
            all_in = all_in && true_pct[s] >= lo && true_pct[s] <= hi;
        }
        contained += all_in ? 1 : 0;
    }
    out.require(contained * 10 >= meta * 9,
                fmt::format("true shares inside the simulated 5-95% band in {}/{} meta-replicates (need 90%)",
                            contained, meta));
}

// ---- end to end ---------------------------------------------------------------------------

struct RoundTrip {
    ingest::HourlySeries observed;
    pipeline::FittedModel model;
    ingest::HourlySeries simulated;
};

std::optional<RoundTrip> g_round_trip;

void end_to_end(Outcome& out) {
    RoundTrip rt;
    rt.observed = testing::synthetic_record(12, 505);
    rt.model = pipeline::fit_all(rt.observed, RunConfig{}).model;
    const auto first = pipeline::simulate(rt.model, 100, 506);
    const auto again = pipeline::simulate(rt.model, 100, 506);
    const auto& s = first.series;

    std::size_t steep_violations = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (steepness::steepness(s.hm0[i], s.tm02[i]) > rt.model.steepness.s_max(s.hm0[i]) + 1e-9) {
            ++steep_violations;
        }
    }
    out.require(steep_violations == 0, fmt::format("{} hours steeper than the limit", steep_violations));
    const double train_max = *std::max_element(rt.observed.hm0.begin(), rt.observed.hm0.end());
    const double sim_max = *std::max_element(s.hm0.begin(), s.hm0.end());
    out.require(sim_max <= train_max, fmt::format("max hm0 {:.3f} m vs training max {:.3f} m", sim_max, train_max));
    out.require(s.size() == 100 * kYear, fmt::format("{} rows (expected {})", s.size(), 100 * kYear));
    out.require(s.hm0 == again.series.hm0 && s.tm02 == again.series.tm02 && s.regime == again.series.regime,
                "rerun with the same seed is bit-identical");
    rt.simulated = first.series;
    g_round_trip = std::move(rt);
}

void storm_coherence(Outcome& out) {
    if (!g_round_trip) {
        out.require(false, "end-to-end round trip unavailable");
        return;
    }
    const auto& rt = *g_round_trip;
    validate::ValidationOptions opt;
    opt.window_years = 12;
    const auto report = validate::validate_series(rt.observed, rt.simulated, rt.model.config.seasons, opt);
    for (const auto& b : report.storms) {
        out.require(b.observed_in_band,
                    fmt::format("q {:.3f}: observed {} storms in 12 years, simulated band [{:.0f}, {:.0f}]",
                                b.thresholds.quantile, b.observed_count, b.simulated_band.q05,
                                b.simulated_band.q95));
        for (const auto* series : {&rt.observed, &rt.simulated}) {
            const auto st = validate::extract_storms(series->hm0, series->tm02, b.thresholds);
            std::int64_t total = st.boundary_hours + st.missing_hours;
            for (auto d : st.durations()) {
                total += d;
            }
            for (auto d : st.interarrivals) {
                total += d;
            }
            if (total != static_cast<std::int64_t>(series->size())) {
                out.require(false, fmt::format("q {:.3f}: segments cover {} of {} hours", b.thresholds.quantile,
                                               total, series->size()));
            }
        }
    }
}

// ---- decomposition -----------------------------------------------------------------------------

void decomposition_identities(Outcome& out) {
    Rng rng(707);
    const auto y = normals(50000, rng, 3.0);
    std::vector<double> mu(y.size());
    std::vector<double> sigma(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        mu[i] = std::sin(1e-3 * static_cast<double>(i));
        sigma[i] = 0.2 + rng.uniform();
    }
    const auto back = seasonal::destandardize(seasonal::standardize(y, mu, sigma), mu, sigma);
    double worst = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        worst = std::max(worst, std::abs(back[i] - y[i]) / std::max(1.0, std::abs(y[i])));
    }
    out.require(worst <= 4 * std::numeric_limits<double>::epsilon(),
                fmt::format("standardize round trip relative error {:.1e}", worst));

    const seasonal::FourierCoefficients a{0.3, 0.39, -0.12, 0.05, 0.02};
    std::vector<double> seg(kYear);
    for (std::size_t t = 0; t < kYear; ++t) {
        seg[t] = seasonal::fourier_eval(a, static_cast<double>(t));
    }
    const auto fit = seasonal::fit_fourier_year(seg);
    double fourier_err = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
        fourier_err = std::max(fourier_err, std::abs(fit.coefficients[k] - a[k]));
    }
    out.require(fourier_err <= 1e-8, fmt::format("Fourier coefficient error {:.1e} (limit 1e-8)", fourier_err));

    const auto model = testing::coefficient_truth();
    bool pd = true;
    try {
        model.validate();
    } catch (const std::exception&) {
        pd = false;
    }
    out.require(pd, "coefficient correlation matrix is positive definite");
    const auto draws = seasonal::sample_coefficients(model, 10000, rng);
    for (const auto& c : model.correlations) {
        std::vector<double> x;
        std::vector<double> z;
        for (const auto& d : draws) {
            x.push_back(d[static_cast<std::size_t>(c.i)]);
            z.push_back(d[static_cast<std::size_t>(c.j)]);
        }
        const double r = stats::pearson_correlation(x, z);
        out.require(std::abs(r - c.rho) <= 0.03,
                    fmt::format("{} ~ {}: sampled rho {:.3f} vs {:.2f}", seasonal::coefficient_name(c.i),
                                seasonal::coefficient_name(c.j), r, c.rho));
    }
}

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"steepness fit recovery", 5.0, steepness_recovery},
        {"ARMA round trip", 30.0, arma_round_trip},
        {"copula targets and selection", 120.0, copula_targets},
        {"renewal fidelity", 120.0, renewal_fidelity},
        {"end-to-end constraints", 300.0, end_to_end},
        {"storm statistics coherence", 300.0, storm_coherence},
        {"decomposition identities", 60.0, decomposition_identities},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome out;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.body(out);
        } catch (const std::exception& e) {
            out.require(false, fmt::format("exception: {}", e.what()));
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.require(secs < c.time_limit_s, fmt::format("runtime {:.1f} s (limit {:.0f} s)", secs, c.time_limit_s));
        failures += out.passed ? 0 : 1;
        fmt::print("{} {}\n", out.passed ? "PASS" : "FAIL", c.name);
        for (const auto& n : out.notes) {
            fmt::print("     {}\n", n);
        }
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
    return failures == 0 ? 0 : 1;
}
