#pragma once

#include "wavesim/arma.hpp"
#include "wavesim/config.hpp"
#include "wavesim/ingest.hpp"
#include "wavesim/renewal.hpp"
#include "wavesim/residuals.hpp"
#include "wavesim/seasonal.hpp"
#include "wavesim/stats.hpp"
#include "wavesim/steepness.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace wavesim::pipeline {

struct Provenance {
    std::string source_id;
    int origin_year = 0;
    std::size_t years = 0;
    std::string library_version;
    /// UTC, ISO 8601.
    std::string fitted_at;
};

/// Everything needed to simulate.
struct FittedModel {
    steepness::SteepnessCurve steepness;
    /// Training distribution of hm0 (m).
    stats::EmpiricalCdf hm0_cdf;
    /// Training distribution of the detrended period tm02 - t_min(hm0) (s).
    stats::EmpiricalCdf tm02_detrended_cdf;
    seasonal::CoefficientModel coefficients;
    arma::ArmaModel hm0_arma;
    arma::ArmaModel tm02_arma;
    residuals::ResidualModel residuals;
    renewal::RenewalModel renewal;
    RunConfig config;
    Provenance provenance;

    /// Throws DomainError (or SizeError for empty margins) on the first
    /// violated invariant.
    void validate() const;
};

struct FitDiagnostics {
    std::size_t gap_filled_hours = 0;
    std::size_t anomalies_masked = 0;
    /// Per year, per process (mu_hm0, sigma_hm0, mu_tm02, sigma_tm02).
    std::vector<std::array<double, 4>> fourier_r2;
    /// Expected of a good fit: mean R^2 of each process is at least 0.9.
    std::array<bool, 4> fourier_r2_ok{};
    arma::LjungBox hm0_whiteness;
    arma::LjungBox tm02_whiteness;
    residuals::ResidualFit residual_fit;
    std::array<renewal::SeasonFitReport, 4> renewal;
    std::size_t censored_runs = 0;
};

struct FitResult {
    FittedModel model;
    FitDiagnostics diagnostics;
};

/// Per-stage diagnostics plus the fitted headline parameters and the
/// effective configuration, as JSON.
std::string diagnostics_to_json(const FitResult& result);

/// Runs every fitting stage in order. Needs at least three whole model years.
/// A failing stage rethrows its error prefixed with the stage name.
FitResult fit_all(const ingest::HourlySeries& series, const RunConfig& config);

struct SimulationOutput {
    /// years x 8766 hours; regime is always 0 or 1.
    ingest::HourlySeries series;
    std::uint64_t seed = 0;
    /// Fingerprint of the model that produced the series.
    std::string model_hash;
};

/// Deterministic in (model, years, seed). Throws DomainError for years < 1.
SimulationOutput simulate(const FittedModel& model, std::size_t years, std::uint64_t seed);

/// Header `model_year,hour_of_year,hm0_m,tm02_s,regime`.
void write_simulation_csv(std::ostream& out, const ingest::HourlySeries& series);
/// Reads what write_simulation_csv writes. Throws FormatError.
ingest::HourlySeries read_simulation_csv(std::istream& in);

// ---- model file ---------------------------------------------------------------

inline constexpr int kModelSchemaVersion = 1;

/// Self-describing JSON with schema version and body checksum.
std::string model_to_json(const FittedModel& model);
/// Throws SchemaError on a wrong format tag, version, checksum or a missing
/// section (named in the message) and DomainError when an invariant fails.
FittedModel model_from_json(const std::string& text);
/// Hex FNV-1a fingerprint of the canonical body.
std::string model_fingerprint(const FittedModel& model);
/// Checksum as stored in the file for a canonical body dump; exposed so
/// tooling can re-sign edited files.
std::string body_checksum(const std::string& canonical_body);

void save_model(const FittedModel& model, const std::filesystem::path& path);
/// Throws IoError when unreadable, then as model_from_json.
FittedModel load_model(const std::filesystem::path& path);

} // namespace wavesim::pipeline
