#pragma once

#include "wavesim/ingest.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace wavesim::steepness {

inline constexpr double kGravity = 9.81;
/// Relative slack when comparing an observed steepness with the limit, so
/// that points lying exactly on the curve survive rounding.
inline constexpr double kAnomalyTolerance = 1e-9;

/// Wave steepness (2 pi / g) h / t^2. Throws DomainError for t <= 0 or h < 0.
double steepness(double h, double t);

/// Height-dependent limiting steepness a (h / b)^(c / h), everything in metres.
struct SteepnessCurve {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double adjusted_r2 = 0.0;
    double rmse = 0.0;

    /// Throws DomainError for h <= 0.
    double s_max(double h) const;
    /// Shortest admissible period for height h: sqrt((2 pi / g) h / s_max(h)).
    double t_min(double h) const;
    /// Throws DomainError unless a, b, c are finite and strictly positive.
    void validate() const;
};

struct BinnedMaximum {
    double h_center = 0.0;
    double s_max_observed = 0.0;
    std::size_t count = 0;
};
using BinnedMaxima = std::vector<BinnedMaximum>;

/// Splits the jointly observed (h > 0, t) pairs into `n_bins` equal-count bins
/// over sorted h; each bin reports its maximum steepness at the midpoint of
/// its h range. Bin sizes differ by at most one when n is not divisible.
BinnedMaxima bin_max_steepness(std::span<const double> h, std::span<const double> t, std::size_t n_bins);
BinnedMaxima bin_max_steepness(const ingest::HourlySeries& series, std::size_t n_bins);

/// Least-squares fit of the limit curve to binned maxima with a, b, c > 0 and
/// b <= b_upper. Multi-start damped Gauss-Newton; throws FitError if no start
/// converges to a finite optimum.
SteepnessCurve fit_limit_curve(const BinnedMaxima& points, double b_upper);

/// t - t_min(h), or nullopt when t lies below the admissible minimum (an
/// anomaly). Values within the anomaly tolerance clamp to zero.
std::optional<double> detrend_period(const SteepnessCurve& curve, double h, double t);
/// t_min(h) + t_tilde. Throws DomainError for t_tilde < 0.
double restore_period(const SteepnessCurve& curve, double h, double t_tilde);

/// Masks (hm0 and tm02) every joint observation steeper than the limit, and
/// every joint observation with hm0 == 0 for which no limit exists.
/// Returns the number of masked hours.
std::size_t flag_anomalies(ingest::HourlySeries& series, const SteepnessCurve& curve);

} // namespace wavesim::steepness
