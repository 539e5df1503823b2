#pragma once

#include "wavesim/copula.hpp"
#include "wavesim/rng.hpp"
#include "wavesim/stats.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace wavesim::residuals {

/// Joint law of the two ARMA innovations within one direction regime.
struct RegimeLaw {
    stats::SkewTParams hm0;
    stats::SkewTParams tm02;
    /// Copula of (F_hm0(e_hm0), F_tm02(e_tm02)).
    copula::CopulaSpec copula;
};

struct ResidualModel {
    std::array<RegimeLaw, 2> regimes;

    /// Throws DomainError on invalid margins or copulas, or a location more
    /// than five scales away from zero.
    void validate() const;
};

struct ResidualFitOptions {
    std::vector<copula::Family> candidates{copula::kAllFamilies.begin(), copula::kAllFamilies.end()};
    std::size_t min_pairs = 1000;
};

struct RegimeFitReport {
    std::size_t pairs = 0;
    double empirical_tau = 0.0;
    double copula_aic = 0.0;
    bool hm0_shape_at_boundary = false;
    bool tm02_shape_at_boundary = false;
};

struct ResidualFit {
    ResidualModel model;
    std::array<RegimeFitReport, 2> report;
};

/// Splits hours by regime (0 or 1; other values and NaN residuals are
/// skipped), fits skew-t margins and selects a copula on rank
/// pseudo-observations. Throws SizeError naming the regime when fewer than
/// options.min_pairs complete pairs are available.
ResidualFit fit_residual_model(std::span<const double> eps_hm0, std::span<const double> eps_tm02,
                               std::span<const std::int8_t> regimes, const ResidualFitOptions& options = {});

struct ResidualPair {
    double hm0;
    double tm02;
};

/// Throws DomainError unless regime is 0 or 1.
ResidualPair sample_pair(const ResidualModel& model, std::int8_t regime, Rng& rng);

} // namespace wavesim::residuals
