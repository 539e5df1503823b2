#include "wavesim/pipeline.hpp"

#include "wavesim/calendar.hpp"
#include "wavesim/error.hpp"
#include "wavesim/version.hpp"

#include <fmt/format.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace wavesim::pipeline {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr auto kYear = static_cast<std::size_t>(kHoursPerYear);

// Runs one fitting stage, prefixing any library error with the stage name
// while keeping its category.
template <typename F>
auto stage(std::string_view name, F&& f) -> decltype(f()) {
    auto tag = [&](const std::exception& e) { return fmt::format("{}: {}", name, e.what()); };
    try {
        return f();
    } catch (const FitError& e) {
        throw FitError(tag(e));
    } catch (const SizeError& e) {
        throw SizeError(tag(e));
    } catch (const DomainError& e) {
        throw DomainError(tag(e));
    } catch (const ConfigError& e) {
        throw ConfigError(tag(e));
    } catch (const FormatError& e) {
        throw FormatError(tag(e));
    }
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    return ingest::format_timestamp(secs);
}

} // namespace

void FittedModel::validate() const {
    steepness.validate();
    if (hm0_cdf.size() < 2 || tm02_detrended_cdf.size() < 2) {
        throw SizeError("model margins are empty");
    }
    if (hm0_cdf.min() <= 0.0) {
        throw DomainError("hm0 margin must be strictly positive");
    }
    if (tm02_detrended_cdf.min() < 0.0) {
        throw DomainError("detrended period margin must be non-negative");
    }
    coefficients.validate();
    hm0_arma.validate();
    tm02_arma.validate();
    residuals.validate();
    renewal.validate();
    config.validate();
}

FitResult fit_all(const ingest::HourlySeries& input, const RunConfig& config) {
    config.validate();
    input.validate();
    const std::size_t years = stage("ingest", [&] { return input.whole_years(); });
    if (years < 3) {
        throw SizeError(fmt::format("ingest: at least 3 whole years of data are required, got {}", years));
    }
    FitResult result;
    auto& model = result.model;
    auto& diag = result.diagnostics;
    model.config = config;

    auto series = stage("gap filling", [&] { return ingest::interpolate_short_gaps(input, config.max_gap_hours); });
    for (std::size_t i = 0; i < series.size(); ++i) {
        diag.gap_filled_hours += (input.hm0_missing(i) && !series.hm0_missing(i)) ? 1 : 0;
    }

    model.steepness = stage("steepness", [&] {
        const auto bins = steepness::bin_max_steepness(series, config.steepness_bins);
        return steepness::fit_limit_curve(bins, config.b_upper_m);
    });
    diag.anomalies_masked = steepness::flag_anomalies(series, model.steepness);

    const std::size_t n = series.size();
    std::vector<double> t_tilde(n, kNaN);
    for (std::size_t i = 0; i < n; ++i) {
        if (series.joint_present(i)) {
            t_tilde[i] = steepness::detrend_period(model.steepness, series.hm0[i], series.tm02[i]).value_or(kNaN);
        }
    }

    std::vector<double> y_h;
    std::vector<double> y_t;
    stage("normalization", [&] {
        model.hm0_cdf = stats::EmpiricalCdf(series.hm0);
        model.tm02_detrended_cdf = stats::EmpiricalCdf(t_tilde);
        y_h = stats::pit_normalize(series.hm0, model.hm0_cdf);
        y_t = stats::pit_normalize(t_tilde, model.tm02_detrended_cdf);
    });

    seasonal::SeasonalPair sh;
    seasonal::SeasonalPair st;
    stage("seasonal decomposition", [&] {
        sh.mu = seasonal::smooth_mean(y_h, config.bandwidth_hours);
        sh.sigma = seasonal::smooth_std(y_h, sh.mu, config.bandwidth_hours);
        st.mu = seasonal::smooth_mean(y_t, config.bandwidth_hours);
        st.sigma = seasonal::smooth_std(y_t, st.mu, config.bandwidth_hours);
    });

    stage("seasonal coefficients", [&] {
        std::vector<seasonal::CoefficientVector> coeffs(years);
        diag.fourier_r2.assign(years, {});
        const std::array<const std::vector<double>*, 4> processes{&sh.mu, &sh.sigma, &st.mu, &st.sigma};
        for (std::size_t y = 0; y < years; ++y) {
            for (int p = 0; p < seasonal::kProcessCount; ++p) {
                const std::span<const double> seg(processes[static_cast<std::size_t>(p)]->data() + y * kYear, kYear);
                const auto fit = seasonal::fit_fourier_year(seg);
                for (int k = 0; k < 5; ++k) {
                    coeffs[y][static_cast<std::size_t>(seasonal::coefficient_index(p, k))] =
                        fit.coefficients[static_cast<std::size_t>(k)];
                }
                diag.fourier_r2[y][static_cast<std::size_t>(p)] = fit.r_squared;
            }
        }
        for (std::size_t p = 0; p < 4; ++p) {
            double mean_r2 = 0.0;
            for (const auto& row : diag.fourier_r2) {
                mean_r2 += row[p];
            }
            diag.fourier_r2_ok[p] = mean_r2 / static_cast<double>(years) >= 0.9;
        }
        model.coefficients = seasonal::fit_coefficient_model(coeffs, config.coefficient_alpha);
    });

    const auto z_h = seasonal::standardize(y_h, sh.mu, sh.sigma);
    const auto z_t = seasonal::standardize(y_t, st.mu, st.sigma);
    model.hm0_arma = stage("arma hm0", [&] { return arma::fit_arma(z_h, config.hm0_order.p, config.hm0_order.q); });
    model.tm02_arma =
        stage("arma tm02", [&] { return arma::fit_arma(z_t, config.tm02_order.p, config.tm02_order.q); });
    const auto e_h = arma::residuals(model.hm0_arma, z_h);
    const auto e_t = arma::residuals(model.tm02_arma, z_t);
    diag.hm0_whiteness = arma::ljung_box(e_h, 20, config.hm0_order.p + config.hm0_order.q);
    diag.tm02_whiteness = arma::ljung_box(e_t, 20, config.tm02_order.p + config.tm02_order.q);

    diag.residual_fit = stage("residual model", [&] {
        residuals::ResidualFitOptions opts;
        opts.candidates = config.copula_candidates;
        return residuals::fit_residual_model(e_h, e_t, series.regime, opts);
    });
    model.residuals = diag.residual_fit.model;

    stage("renewal", [&] {
        const auto runs = renewal::extract_durations(series.regime, config.seasons, 0);
        for (const auto& r : runs) {
            diag.censored_runs += r.censored ? 1 : 0;
        }
        renewal::RenewalFitOptions opts;
        opts.candidates = config.copula_candidates;
        auto fit = renewal::fit_renewal(runs, config.seasons, opts);
        model.renewal = std::move(fit.model);
        diag.renewal = fit.report;
    });

    model.provenance = {input.source_id, input.origin_year, years, std::string(library_version()), utc_now()};
    stage("assembly", [&] { model.validate(); });
    return result;
}

SimulationOutput simulate(const FittedModel& model, std::size_t years, std::uint64_t seed) {
    if (years < 1) {
        throw DomainError("simulation needs at least one year");
    }
    const std::size_t n = years * kYear;
    const std::size_t burn = model.config.burn_in_hours;
    const std::size_t total = n + burn;

    // regimes, with a lead-in that ends exactly at hour 0 of model year 1
    auto rng_regime = Rng::stream(seed, "renewal");
    const auto lead_start = static_cast<std::int64_t>((kYear - burn % kYear) % kYear);
    const std::int8_t initial = rng_regime.uniform() < 0.5 ? ingest::kRegimeNorth : ingest::kRegimeSouthwest;
    const auto regimes =
        renewal::simulate_regimes(model.renewal, static_cast<std::int64_t>(total), initial, rng_regime, lead_start);

    auto rng_coef = Rng::stream(seed, "coefficients");
    const auto coeffs = seasonal::sample_coefficients(model.coefficients, years, rng_coef);
    const int hw = model.config.spline_half_width_hours;
    const auto sh = seasonal::build_seasonal_series(coeffs, seasonal::Variable::hm0, hw);
    const auto st = seasonal::build_seasonal_series(coeffs, seasonal::Variable::tm02, hw);

    auto rng_res = Rng::stream(seed, "residuals");
    std::vector<double> e_h(total);
    std::vector<double> e_t(total);
    for (std::size_t i = 0; i < total; ++i) {
        const auto pair = residuals::sample_pair(model.residuals, regimes[i], rng_res);
        e_h[i] = pair.hm0;
        e_t[i] = pair.tm02;
    }
    const auto z_h = arma::simulate_arma(model.hm0_arma, e_h, burn);
    const auto z_t = arma::simulate_arma(model.tm02_arma, e_t, burn);
    const auto y_h = seasonal::destandardize(z_h, sh.mu, sh.sigma);
    const auto y_t = seasonal::destandardize(z_t, st.mu, st.sigma);

    SimulationOutput out;
    out.seed = seed;
    out.model_hash = model_fingerprint(model);
    auto& s = out.series;
    s.hm0 = stats::pit_inverse(y_h, model.hm0_cdf);
    const auto t_tilde = stats::pit_inverse(y_t, model.tm02_detrended_cdf);
    s.tm02.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.tm02[i] = steepness::restore_period(model.steepness, s.hm0[i], t_tilde[i]);
    }
    s.regime.assign(regimes.begin() + static_cast<std::ptrdiff_t>(burn), regimes.end());
    s.origin_year = 1;
    s.source_id = "simulation";
    return out;
}

// ---- simulation CSV ------------------------------------------------------------

namespace {

constexpr std::string_view kSimulationHeader = "model_year,hour_of_year,hm0_m,tm02_s,regime";

template <typename T>
T parse_field(std::string_view text, std::size_t line) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw FormatError(fmt::format("simulation CSV line {}: cannot parse '{}'", line, text));
    }
    return value;
}

} // namespace

void write_simulation_csv(std::ostream& out, const ingest::HourlySeries& series) {
    out << kSimulationHeader << '\n';
    fmt::memory_buffer buf;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto clock = clock_from_index(static_cast<std::int64_t>(i));
        fmt::format_to(std::back_inserter(buf), "{},{},{},{},{}\n", clock.year_index + 1, clock.hour_of_year,
                       series.hm0[i], series.tm02[i], static_cast<int>(series.regime[i]));
        if (buf.size() > (1u << 20)) {
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

ingest::HourlySeries read_simulation_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("simulation CSV is empty");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kSimulationHeader) {
        throw FormatError(fmt::format("simulation CSV header must be '{}'", kSimulationHeader));
    }
    ingest::HourlySeries s;
    s.origin_year = 1;
    s.source_id = "simulation";
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::array<std::string_view, 5> f;
        std::size_t start = 0;
        for (std::size_t k = 0; k < 5; ++k) {
            const auto comma = line.find(',', start);
            if ((k < 4) == (comma == std::string::npos)) {
                throw FormatError(fmt::format("simulation CSV line {}: expected 5 fields", lineno));
            }
            f[k] = std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            start = comma + 1;
        }
        const auto year = parse_field<std::int64_t>(f[0], lineno);
        const auto hour = parse_field<std::int64_t>(f[1], lineno);
        if (year < 1 || hour < 0 || hour >= kHoursPerYear ||
            index_from_clock({year - 1, hour}) != static_cast<std::int64_t>(s.size())) {
            throw FormatError(fmt::format("simulation CSV line {}: hours are not consecutive", lineno));
        }
        s.hm0.push_back(parse_field<double>(f[2], lineno));
        s.tm02.push_back(parse_field<double>(f[3], lineno));
        const int r = parse_field<int>(f[4], lineno);
        if (r != 0 && r != 1) {
            throw FormatError(fmt::format("simulation CSV line {}: regime must be 0 or 1", lineno));
        }
        s.regime.push_back(static_cast<std::int8_t>(r));
    }
    if (s.empty()) {
        throw FormatError("simulation CSV has no rows");
    }
    return s;
}

} // namespace wavesim::pipeline
