// wavesim: fit, simulate and validate hourly wave records.

#include <wavesim/config.hpp>
#include <wavesim/error.hpp>
#include <wavesim/ingest.hpp>
#include <wavesim/pipeline.hpp>
#include <wavesim/steepness.hpp>
#include <wavesim/validate.hpp>
#include <wavesim/version.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace wavesim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 2;
constexpr int kExitFit = 3;

RunConfig effective_config(const std::string& path) {
    return path.empty() ? RunConfig{} : load_config(path);
}

json config_echo(const RunConfig& config) { return json::parse(config_to_json(config)); }

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError(fmt::format("cannot write '{}'", path.string()));
    }
    out << text << '\n';
    if (!out) {
        throw IoError(fmt::format("error while writing '{}'", path.string()));
    }
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(fmt::format("cannot open '{}'", path.string()));
    }
    return in;
}

ingest::HourlySeries read_observations(const fs::path& path, const RunConfig& config) {
    const auto parsed = ingest::parse_csv_file(path);
    if (parsed.malformed_cells > 0) {
        fmt::print(std::cerr, "warning: {} malformed cells in '{}' read as missing\n", parsed.malformed_cells,
                   path.string());
    }
    auto series = ingest::to_model_calendar(parsed.records, path.filename().string());
    return ingest::interpolate_short_gaps(std::move(series), config.max_gap_hours);
}

// Observation files start with a timestamp column, simulation files with model_year.
ingest::HourlySeries read_any_series(const fs::path& path, const RunConfig& config) {
    auto in = open_input(path);
    std::string header;
    if (!std::getline(in, header)) {
        throw FormatError(fmt::format("'{}' is empty", path.string()));
    }
    if (header.rfind("model_year", 0) == 0) {
        in.seekg(0);
        auto series = pipeline::read_simulation_csv(in);
        series.source_id = path.filename().string();
        return series;
    }
    return read_observations(path, config);
}

void write_simulation(const fs::path& path, const pipeline::SimulationOutput& sim, std::size_t years,
                      const RunConfig& config) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw IoError(fmt::format("cannot write '{}'", path.string()));
        }
        pipeline::write_simulation_csv(out, sim.series);
        if (!out) {
            throw IoError(fmt::format("error while writing '{}'", path.string()));
        }
    }
    json meta{{"generator", fmt::format("wavesim {}", library_version())},
              {"model_hash", sim.model_hash},
              {"seed", sim.seed},
              {"years", years},
              {"rows", sim.series.size()},
              {"config", config_echo(config)}};
    write_text(fs::path(path).concat(".meta.json"), meta.dump(1));
}

// ---- subcommands ---------------------------------------------------------------

struct FitArgs {
    std::string input;
    std::string config;
    std::string output_model;
    std::string diagnostics;
};

int cmd_fit(const FitArgs& a) {
    const auto config = effective_config(a.config);
    const auto series = [&] {
        auto parsed = ingest::parse_csv_file(a.input);
        return ingest::to_model_calendar(parsed.records, fs::path(a.input).filename().string());
    }();
    const auto result = pipeline::fit_all(series, config);
    pipeline::save_model(result.model, a.output_model);
    const fs::path diag = a.diagnostics.empty() ? fs::path(a.output_model).concat(".diagnostics.json")
                                                : fs::path(a.diagnostics);
    write_text(diag, pipeline::diagnostics_to_json(result));
    fmt::print("fitted {} years; model written to {}\n", result.model.provenance.years, a.output_model);
    return kExitOk;
}

struct SimulateArgs {
    std::string model;
    std::size_t years = 1;
    std::uint64_t seed = 1;
    std::string output;
    std::size_t replicates = 1;
    unsigned jobs = 1;
};

fs::path replicate_path(const fs::path& base, std::size_t r, std::size_t count) {
    if (count == 1) {
        return base;
    }
    auto name = fmt::format("{}_r{:04}{}", base.stem().string(), r + 1, base.extension().string());
    return base.parent_path() / name;
}

int cmd_simulate(const SimulateArgs& a) {
    const auto model = pipeline::load_model(a.model);
    std::atomic<std::size_t> next{0};
    std::mutex error_lock;
    std::exception_ptr first_error;
    auto worker = [&] {
        for (std::size_t r = next++; r < a.replicates; r = next++) {
            try {
                const auto sim = pipeline::simulate(model, a.years, a.seed + r);
                write_simulation(replicate_path(a.output, r, a.replicates), sim, a.years, model.config);
            } catch (...) {
                std::lock_guard lock(error_lock);
                if (!first_error) {
                    first_error = std::current_exception();
                }
                next = a.replicates;
            }
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(a.jobs, static_cast<unsigned>(a.replicates)));
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    pool.clear();
    if (first_error) {
        std::rethrow_exception(first_error);
    }
    fmt::print("simulated {} x {} years\n", a.replicates, a.years);
    return kExitOk;
}

struct ValidateArgs {
    std::string observed;
    std::string simulated;
    std::vector<double> quantiles{0.8, 0.9, 0.95, 0.965, 0.975, 0.99};
    std::string output_report;
    std::string config;
    std::size_t window_years = 0;
    std::string tables_dir;
};

void write_tables(const fs::path& dir, const validate::ValidationReport& r) {
    fs::create_directories(dir);
    std::ostringstream pct;
    pct << "source,year,season,sw_fraction\n";
    auto dump_fractions = [&](std::string_view source, const std::vector<validate::SeasonFractions>& rows) {
        for (std::size_t y = 0; y < rows.size(); ++y) {
            for (Season s : kAllSeasons) {
                fmt::print(pct, "{},{},{},{}\n", source, y + 1, season_name(s), rows[y][static_cast<std::size_t>(s)]);
            }
        }
    };
    dump_fractions("observed", r.observed_percentages);
    dump_fractions("simulated", r.simulated_percentages);
    write_text(dir / "percentages.csv", pct.str());

    std::ostringstream storms;
    storms << "quantile,h_star_m,t_star_s,observed_count,simulated_q05,simulated_q95,observed_in_band,"
              "duration_ks_p,interarrival_ks_p\n";
    std::ostringstream hist;
    hist << "quantile,kind,source,bin_start_hours,fraction\n";
    for (const auto& b : r.storms) {
        fmt::print(storms, "{},{},{},{},{},{},{},{},{}\n", b.thresholds.quantile, b.thresholds.h_star,
                   b.thresholds.t_star, b.observed_count, b.simulated_band.q05, b.simulated_band.q95,
                   b.observed_in_band ? 1 : 0, b.duration_ks_p, b.interarrival_ks_p);
        auto dump = [&](std::string_view kind, std::string_view source, const validate::DurationSummary& s) {
            for (std::size_t i = 0; i < s.histogram.size(); ++i) {
                fmt::print(hist, "{},{},{},{},{}\n", b.thresholds.quantile, kind, source,
                           validate::kDurationBinEdges[i], s.histogram[i]);
            }
        };
        dump("duration", "observed", b.observed_durations);
        dump("duration", "simulated", b.simulated_durations);
        dump("interarrival", "observed", b.observed_interarrivals);
        dump("interarrival", "simulated", b.simulated_interarrivals);
    }
    write_text(dir / "storms.csv", storms.str());
    write_text(dir / "durations.csv", hist.str());
}

int cmd_validate(const ValidateArgs& a) {
    const auto config = effective_config(a.config);
    const auto observed = read_any_series(a.observed, config);
    const auto simulated = read_any_series(a.simulated, config);
    validate::ValidationOptions opts;
    opts.quantiles = a.quantiles;
    opts.window_years = a.window_years;
    const auto report = validate::validate_series(observed, simulated, config.seasons, opts);
    write_text(a.output_report, validate::report_to_json(report, &config));
    if (!a.tables_dir.empty()) {
        write_tables(a.tables_dir, report);
    }
    std::size_t in_band = 0;
    for (const auto& b : report.storms) {
        in_band += b.observed_in_band ? 1 : 0;
    }
    fmt::print("validated {} observed against {} simulated years; storm counts in band for {}/{} thresholds\n",
               report.observed_years, report.simulated_years, in_band, report.storms.size());
    return kExitOk;
}

struct SteepnessArgs {
    std::string input;
    std::string config;
    std::string output;
};

int cmd_steepness_fit(const SteepnessArgs& a) {
    const auto config = effective_config(a.config);
    const auto series = read_observations(a.input, config);
    const auto bins = steepness::bin_max_steepness(series, config.steepness_bins);
    const auto curve = steepness::fit_limit_curve(bins, config.b_upper_m);
    auto masked = series;
    const auto anomalies = steepness::flag_anomalies(masked, curve);
    json points = json::array();
    for (const auto& b : bins) {
        points.push_back({{"h_center_m", b.h_center}, {"s_max_observed", b.s_max_observed}, {"count", b.count}});
    }
    json doc{{"generator", fmt::format("wavesim {}", library_version())},
             {"config", config_echo(config)},
             {"curve",
              {{"a", curve.a}, {"b_m", curve.b}, {"c_m", curve.c}, {"adjusted_r2", curve.adjusted_r2},
               {"rmse", curve.rmse}}},
             {"anomalies", anomalies},
             {"bins", points}};
    if (a.output.empty()) {
        std::cout << doc.dump(1) << '\n';
    } else {
        write_text(a.output, doc.dump(1));
    }
    fmt::print(std::cerr, "a = {:.5f}, b = {:.4f} m, c = {:.5f} m, RMSE = {:.5f}, {} anomalies\n", curve.a, curve.b,
               curve.c, curve.rmse, anomalies);
    return kExitOk;
}

struct ReportArgs {
    std::string model;
};

std::string arma_line(const arma::ArmaModel& m) {
    return fmt::format("ARMA({},{}) ar=[{:.4f}] ma=[{:.4f}] sigma2={:.4f}", m.p(), m.q(), fmt::join(m.ar, ", "),
                       fmt::join(m.ma, ", "), m.sigma2);
}

int cmd_report(const ReportArgs& a) {
    const auto m = pipeline::load_model(a.model);
    fmt::print("model        {}\n", pipeline::model_fingerprint(m));
    fmt::print("source       {} ({} years from {}), fitted {} with wavesim {}\n", m.provenance.source_id,
               m.provenance.years, m.provenance.origin_year, m.provenance.fitted_at, m.provenance.library_version);
    fmt::print("steepness    a={:.5f} b={:.4f} m c={:.5f} m (RMSE {:.5f})\n", m.steepness.a, m.steepness.b,
               m.steepness.c, m.steepness.rmse);
    fmt::print("margins      hm0 n={} tm02~ n={}\n", m.hm0_cdf.size(), m.tm02_detrended_cdf.size());
    fmt::print("hm0          {}\n", arma_line(m.hm0_arma));
    fmt::print("tm02         {}\n", arma_line(m.tm02_arma));
    constexpr std::array<const char*, 2> kRegimes{"north", "southwest"};
    for (std::size_t k = 0; k < 2; ++k) {
        const auto& law = m.residuals.regimes[k];
        fmt::print("residuals    {:<9}  copula {} (tau {:.3f})\n", kRegimes[k], law.copula.describe(),
                   copula::model_tau(law.copula));
    }
    for (Season s : kAllSeasons) {
        const auto& sm = m.renewal.season(s);
        fmt::print("renewal      {:<6}  N->SW {}  SW->N {}\n", season_name(s), sm.north_then_southwest.describe(),
                   sm.southwest_then_north.describe());
    }
    fmt::print("correlations {} significant seasonal coefficient pairs\n", m.coefficients.correlations.size());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fit, simulate and validate hourly wave height, period and direction records"};
    app.set_version_flag("--version", std::string(library_version()));
    app.require_subcommand(1);

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a model to an hourly observation CSV");
    fit_cmd->add_option("--input,-i", fit.input, "timestamp,hm0_m,tm02_s,dir_deg CSV")->required();
    fit_cmd->add_option("--config,-c", fit.config, "JSON run configuration");
    fit_cmd->add_option("--output-model,-o", fit.output_model, "Model file to write")->required();
    fit_cmd->add_option("--diagnostics", fit.diagnostics, "Diagnostics JSON (default: <model>.diagnostics.json)");

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate hourly series from a fitted model");
    sim_cmd->add_option("--model,-m", sim.model, "Model file")->required();
    sim_cmd->add_option("--years,-y", sim.years, "Years per replicate")->required()->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed,-s", sim.seed, "Seed; replicate r uses seed + r")->capture_default_str();
    sim_cmd->add_option("--output,-o", sim.output, "Output CSV")->required();
    sim_cmd->add_option("--replicates,-r", sim.replicates, "Independent replicates (files get an _rNNNN suffix)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sim_cmd->add_option("--jobs,-j", sim.jobs, "Replicates simulated in parallel")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    ValidateArgs val;
    auto* val_cmd = app.add_subcommand("validate", "Compare simulated with observed series");
    val_cmd->add_option("--observed", val.observed, "Observation or simulation CSV")->required();
    val_cmd->add_option("--simulated", val.simulated, "Simulation CSV")->required();
    val_cmd->add_option("--quantiles,-q", val.quantiles, "Joint storm threshold quantiles")
        ->delimiter(',')
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    val_cmd->add_option("--output-report,-o", val.output_report, "JSON report")->required();
    val_cmd->add_option("--config,-c", val.config, "JSON run configuration");
    val_cmd->add_option("--window-years", val.window_years, "Storm count window (default: observed years)");
    val_cmd->add_option("--tables-dir", val.tables_dir, "Also write CSV tables here");

    SteepnessArgs st;
    auto* st_cmd = app.add_subcommand("steepness-fit", "Fit the limiting steepness curve only");
    st_cmd->add_option("--input,-i", st.input, "Observation CSV")->required();
    st_cmd->add_option("--config,-c", st.config, "JSON run configuration");
    st_cmd->add_option("--output,-o", st.output, "JSON output (default: stdout)");

    ReportArgs rep;
    auto* rep_cmd = app.add_subcommand("report", "Summarize a model file");
    rep_cmd->add_option("--model,-m", rep.model, "Model file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitData;
    }

    try {
        if (fit_cmd->parsed()) {
            return cmd_fit(fit);
        }
        if (sim_cmd->parsed()) {
            return cmd_simulate(sim);
        }
        if (val_cmd->parsed()) {
            return cmd_validate(val);
        }
        if (st_cmd->parsed()) {
            return cmd_steepness_fit(st);
        }
        return cmd_report(rep);
    } catch (const FitError& e) {
        fmt::print(std::cerr, "error: {}\n", e.what());
        return kExitFit;
    } catch (const Error& e) {
        fmt::print(std::cerr, "error: {}\n", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        fmt::print(std::cerr, "internal error: {}\n", e.what());
        return 1;
    }
}
