#pragma once

#include "wavesim/calendar.hpp"
#include "wavesim/config.hpp"
#include "wavesim/ingest.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wavesim::validate {

/// Fraction of non-missing hours in the southwest regime, per season; NaN
/// when a season has no data in that year.
using SeasonFractions = std::array<double, 4>;

/// One row per whole model year. Throws SizeError unless the series covers
/// at least one whole year.
std::vector<SeasonFractions> season_percentages(std::span<const std::int8_t> regimes,
                                                const SeasonBoundaries& seasons);

struct StormThresholds {
    double quantile = 0.0;
    double h_star = 0.0;
    double t_star = 0.0;

    /// Throws DomainError unless both thresholds are positive.
    void validate() const;
};

/// Type-7 sample quantiles of the present hm0 and tm02 values.
StormThresholds thresholds_from_quantile(std::span<const double> hm0, std::span<const double> tm02, double q);

struct StormEvent {
    std::int64_t start = 0;
    std::int64_t duration = 0;
    double peak_hm0 = 0.0;
    double peak_tm02 = 0.0;
};

/// Hours split into storm runs (hm0 >= h* and tm02 >= t*), interarrivals
/// (calm runs directly between two storms), boundary calm hours (before the
/// first storm, after the last, or next to missing data) and missing hours.
/// These four parts tile the series.
struct StormStatistics {
    std::vector<StormEvent> events;
    std::vector<std::int64_t> interarrivals;
    std::int64_t boundary_hours = 0;
    std::int64_t missing_hours = 0;

    std::vector<std::int64_t> durations() const;
};

StormStatistics extract_storms(std::span<const double> hm0, std::span<const double> tm02,
                               const StormThresholds& thresholds);

struct CountBand {
    double q05 = 0.0;
    double q95 = 0.0;
    std::vector<std::size_t> counts;
};

/// Storm counts in disjoint windows of window_years. Throws SizeError when
/// fewer than two windows fit.
CountBand storm_count_band(std::span<const double> hm0, std::span<const double> tm02, std::size_t window_years,
                           const StormThresholds& thresholds);

// ---- densities ------------------------------------------------------------------

struct Density2D {
    std::vector<double> x_grid;
    std::vector<double> y_grid;
    /// Row-major, y_grid.size() rows of x_grid.size() values.
    std::vector<double> values;

    double at(std::size_t ix, std::size_t iy) const { return values[iy * x_grid.size() + ix]; }
};

/// Linearly binned Gaussian KDE on a regular grid, evaluated by separable
/// convolution. Non-finite pairs are skipped.
Density2D kde_2d(std::span<const double> x, std::span<const double> y, std::vector<double> x_grid,
                 std::vector<double> y_grid, double bandwidth_x, double bandwidth_y);

using Polyline = std::vector<std::array<double, 2>>;

/// Marching-squares level set of a gridded density.
std::vector<Polyline> contour_lines(const Density2D& density, double level);

enum class RegimeFilter { all, north, southwest };

std::string_view filter_name(RegimeFilter f);

struct DensityCurves {
    std::string variable;
    RegimeFilter filter = RegimeFilter::all;
    double bandwidth = 0.0;
    std::vector<double> grid;
    std::vector<std::vector<double>> observed_years;
    std::vector<double> simulated_min;
    std::vector<double> simulated_max;
    /// Share of (observed year, grid point) values inside [min, max].
    double coverage = 0.0;
};

struct ContourSet {
    RegimeFilter filter = RegimeFilter::all;
    double level = 0.0;
    std::vector<Polyline> observed;
    std::vector<Polyline> simulated;
};

struct DensityOptions {
    std::size_t grid_points = 128;
    std::size_t grid_points_2d = 64;
    /// Simulated years used for the envelope; later years are ignored.
    std::size_t max_simulated_years = 200;
    std::vector<double> contour_levels{5e-2, 5e-3};
};

struct DensityReport {
    std::vector<DensityCurves> curves;
    std::vector<ContourSet> contours;
};

/// Per-year KDE curves of hm0, tm02 and steepness for each regime filter,
/// the envelope of the simulated years, and pooled 2-D contours of
/// (hm0, tm02). Throws SizeError when either input is empty.
DensityReport density_report(const ingest::HourlySeries& observed, const ingest::HourlySeries& simulated,
                             const DensityOptions& options = {});

// ---- full report ---------------------------------------------------------------

struct DurationSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double q90 = 0.0;
    /// Frequencies over kDurationBinEdges.
    std::vector<double> histogram;
};

/// Edges in hours of the duration histogram bins [e_k, e_{k+1}); the last bin is open.
inline constexpr std::array<std::int64_t, 20> kDurationBinEdges{1,  2,  3,   4,   6,   8,   12,  16,  24,  32,
                                                                48, 64, 96, 128, 192, 256, 384, 512, 768, 1024};

DurationSummary summarize_durations(std::span<const std::int64_t> values);

struct ThresholdBlock {
    StormThresholds thresholds;
    std::size_t observed_count = 0;
    CountBand simulated_band;
    bool observed_in_band = false;
    DurationSummary observed_durations;
    DurationSummary simulated_durations;
    DurationSummary observed_interarrivals;
    DurationSummary simulated_interarrivals;
    double duration_ks_p = 1.0;
    double interarrival_ks_p = 1.0;
};

struct ValidationOptions {
    std::vector<double> quantiles{0.8, 0.9, 0.95, 0.965, 0.975, 0.99};
    /// Storm-count window; 0 means the number of whole observed years.
    std::size_t window_years = 0;
    DensityOptions density;
};

struct ValidationReport {
    std::vector<SeasonFractions> observed_percentages;
    std::vector<SeasonFractions> simulated_percentages;
    std::array<double, 4> percentage_ks_p{};
    std::vector<ThresholdBlock> storms;
    DensityReport densities;
    std::size_t observed_years = 0;
    std::size_t simulated_years = 0;
    std::size_t window_years = 0;
};

/// Both series must cover whole model years. Thresholds come from the
/// observed series.
ValidationReport validate_series(const ingest::HourlySeries& observed, const ingest::HourlySeries& simulated,
                                 const SeasonBoundaries& seasons, const ValidationOptions& options = {});

inline constexpr int kReportSchemaVersion = 1;

/// JSON document {"schema_version", "percentages", "storms", "densities", ...}.
/// `config` is echoed when given.
std::string report_to_json(const ValidationReport& report, const RunConfig* config = nullptr);

} // namespace wavesim::validate
