#pragma once

#include "wavesim/calendar.hpp"
#include "wavesim/copula.hpp"
#include "wavesim/rng.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace wavesim::renewal {

/// A maximal run of one direction regime.
struct DurationRecord {
    std::int8_t regime = 0;
    std::int64_t length = 0;
    Season season = Season::spring;
    /// Absolute hour index of the first hour.
    std::int64_t start = 0;
    /// Touches a missing hour or the series edge, so its true length is unknown.
    bool censored = false;
};

/// Runs of non-missing regime values. Missing hours split runs; `first_hour`
/// is the absolute model-calendar hour of regimes[0].
std::vector<DurationRecord> extract_durations(std::span<const std::int8_t> regimes,
                                              const SeasonBoundaries& seasons, std::int64_t first_hour = 0);

/// Empirical duration distribution on the rank / (n + 1) grid.
class DurationMargin {
public:
    DurationMargin() = default;
    /// Throws SizeError when empty and DomainError for lengths < 1.
    explicit DurationMargin(std::vector<std::int64_t> durations);

    /// Linear interpolation between order statistics placed at k / (n + 1),
    /// rounded half-up and floored at one hour.
    std::int64_t quantile(double u) const;
    std::span<const std::int64_t> sorted() const { return sorted_; }
    bool empty() const { return sorted_.empty(); }

private:
    std::vector<std::int64_t> sorted_;
};

struct SeasonModel {
    DurationMargin north;
    DurationMargin southwest;
    /// Joins (N_{n-1}, SW_n): a north run and the southwest run after it.
    copula::CopulaSpec north_then_southwest;
    /// Joins (SW_n, N_n): a southwest run and the north run after it.
    copula::CopulaSpec southwest_then_north;
};

struct RenewalModel {
    SeasonBoundaries seasons = SeasonBoundaries::meteorological();
    std::array<SeasonModel, 4> by_season;

    const SeasonModel& season(Season s) const { return by_season[static_cast<std::size_t>(s)]; }
    /// Throws DomainError when a margin is empty or a copula is invalid.
    void validate() const;
};

struct RenewalFitOptions {
    std::vector<copula::Family> candidates{copula::kAllFamilies.begin(), copula::kAllFamilies.end()};
    std::size_t min_pairs = 30;
};

/// Per-season diagnostics of a renewal fit.
struct SeasonFitReport {
    std::size_t north_runs = 0;
    std::size_t southwest_runs = 0;
    std::size_t ns_pairs = 0;
    std::size_t sn_pairs = 0;
    double ns_empirical_tau = 0.0;
    double sn_empirical_tau = 0.0;
    double ns_aic = 0.0;
    double sn_aic = 0.0;
};

struct RenewalFit {
    RenewalModel model;
    std::array<SeasonFitReport, 4> report;
};

/// Empirical margins per season and regime (uncensored runs) and a selected
/// copula per season for each ordered pair type. A pair belongs to the season
/// of its later run. Throws SizeError naming the season when a pair set is
/// smaller than options.min_pairs.
RenewalFit fit_renewal(std::span<const DurationRecord> durations, const SeasonBoundaries& seasons,
                       const RenewalFitOptions& options = {});

/// Alternating renewal simulation over n_hours starting at absolute hour
/// `first_hour`. The first run is drawn from its margin; each later run is
/// drawn conditionally on the uniform that produced its predecessor, using the
/// copula of the new run's season. The last run is truncated.
std::vector<std::int8_t> simulate_regimes(const RenewalModel& model, std::int64_t n_hours, std::int8_t initial_regime,
                                          Rng& rng, std::int64_t first_hour = 0);

} // namespace wavesim::renewal
