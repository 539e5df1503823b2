#include "wavesim/steepness.hpp"

#include "wavesim/error.hpp"
#include "wavesim/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace wavesim::steepness {

namespace {

constexpr double kSteepnessFactor = 2.0 * std::numbers::pi / kGravity;

double curve_value(double a, double b, double c, double h) {
    return a * std::exp((c / h) * std::log(h / b));
}

} // namespace

double steepness(double h, double t) {
    if (!(t > 0.0)) {
        throw DomainError("steepness requires a positive period");
    }
    if (h < 0.0) {
        throw DomainError("steepness requires a non-negative height");
    }
    return kSteepnessFactor * h / (t * t);
}

double SteepnessCurve::s_max(double h) const {
    if (!(h > 0.0)) {
        throw DomainError("limiting steepness undefined for h <= 0");
    }
    return curve_value(a, b, c, h);
}

double SteepnessCurve::t_min(double h) const { return std::sqrt(kSteepnessFactor * h / s_max(h)); }

void SteepnessCurve::validate() const {
    for (double v : {a, b, c}) {
        if (!(std::isfinite(v) && v > 0.0)) {
            throw DomainError("steepness curve parameters must be finite and positive");
        }
    }
}

BinnedMaxima bin_max_steepness(std::span<const double> h, std::span<const double> t, std::size_t n_bins) {
    if (h.size() != t.size()) {
        throw SizeError("height and period arrays differ in length");
    }
    if (n_bins < 2) {
        throw SizeError("at least two bins are required");
    }
    std::vector<std::pair<double, double>> points;
    points.reserve(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (std::isfinite(h[i]) && std::isfinite(t[i]) && h[i] > 0.0 && t[i] > 0.0) {
            points.emplace_back(h[i], steepness(h[i], t[i]));
        }
    }
    if (points.size() < n_bins) {
        throw SizeError("only " + std::to_string(points.size()) + " joint observations for " +
                        std::to_string(n_bins) + " bins");
    }
    std::sort(points.begin(), points.end());
    if (points.front().first == points.back().first) {
        throw SizeError("all heights identical: bins would have zero width");
    }

    BinnedMaxima bins;
    bins.reserve(n_bins);
    const std::size_t base = points.size() / n_bins;
    const std::size_t extra = points.size() % n_bins;
    std::size_t start = 0;
    for (std::size_t b = 0; b < n_bins; ++b) {
        const std::size_t len = base + (b < extra ? 1 : 0);
        double s_max = 0.0;
        for (std::size_t i = start; i < start + len; ++i) {
            s_max = std::max(s_max, points[i].second);
        }
        const double lo = points[start].first;
        const double hi = points[start + len - 1].first;
        bins.push_back({0.5 * (lo + hi), s_max, len});
        start += len;
    }
    return bins;
}

BinnedMaxima bin_max_steepness(const ingest::HourlySeries& series, std::size_t n_bins) {
    return bin_max_steepness(series.hm0, series.tm02, n_bins);
}

SteepnessCurve fit_limit_curve(const BinnedMaxima& points, double b_upper) {
    if (points.size() < 4) {
        throw FitError("limit curve needs at least 4 binned maxima, got " + std::to_string(points.size()));
    }
    double h_max = 0.0;
    double s_top = 0.0;
    for (const auto& p : points) {
        if (!(p.h_center > 0.0) || !std::isfinite(p.s_max_observed)) {
            throw FitError("binned maxima must have positive heights and finite steepness");
        }
        h_max = std::max(h_max, p.h_center);
        s_top = std::max(s_top, p.s_max_observed);
    }
    if (!(b_upper > h_max)) {
        throw FitError("b_upper must exceed the largest bin height");
    }

    const auto n = static_cast<Eigen::Index>(points.size());
    auto residuals = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& p = points[static_cast<std::size_t>(i)];
            r[i] = p.s_max_observed - curve_value(x[0], x[1], x[2], p.h_center);
        }
        return r;
    };
    Eigen::VectorXd lower(3);
    Eigen::VectorXd upper(3);
    lower << 1e-10, 1e-6, 1e-8;
    upper << 10.0, b_upper, 100.0;

    numeric::LeastSquaresResult best;
    best.sum_of_squares = std::numeric_limits<double>::infinity();
    for (double c0 : {0.01, 0.1, 1.0}) {
        Eigen::VectorXd x0(3);
        x0 << s_top, b_upper, c0;
        auto result = numeric::levenberg_marquardt(residuals, x0, lower, upper);
        if (std::isfinite(result.sum_of_squares) && result.sum_of_squares < best.sum_of_squares) {
            best = std::move(result);
        }
    }
    if (!std::isfinite(best.sum_of_squares) || best.x.size() != 3) {
        throw FitError("limit curve fit did not converge from any start");
    }

    SteepnessCurve curve{best.x[0], best.x[1], best.x[2]};
    curve.validate();
    double mean = 0.0;
    for (const auto& p : points) {
        mean += p.s_max_observed;
    }
    mean /= static_cast<double>(n);
    double sst = 0.0;
    for (const auto& p : points) {
        sst += (p.s_max_observed - mean) * (p.s_max_observed - mean);
    }
    const double dof = static_cast<double>(n - 3);
    curve.rmse = std::sqrt(best.sum_of_squares / dof);
    curve.adjusted_r2 = sst > 0.0 ? 1.0 - (best.sum_of_squares / dof) / (sst / static_cast<double>(n - 1)) : 1.0;
    return curve;
}

std::optional<double> detrend_period(const SteepnessCurve& curve, double h, double t) {
    const double lower = curve.t_min(h);
    const double diff = t - lower;
    if (diff >= 0.0) {
        return diff;
    }
    // steepness within tolerance of the limit <=> t >= t_min / sqrt(1 + tol)
    if (t >= lower / std::sqrt(1.0 + kAnomalyTolerance)) {
        return 0.0;
    }
    return std::nullopt;
}

double restore_period(const SteepnessCurve& curve, double h, double t_tilde) {
    if (t_tilde < 0.0) {
        throw DomainError("detrended period must be non-negative");
    }
    return curve.t_min(h) + t_tilde;
}

std::size_t flag_anomalies(ingest::HourlySeries& series, const SteepnessCurve& curve) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!series.joint_present(i)) {
            continue;
        }
        const double h = series.hm0[i];
        const bool too_steep =
            !(h > 0.0) || steepness(h, series.tm02[i]) > curve.s_max(h) * (1.0 + kAnomalyTolerance);
        if (too_steep) {
            series.hm0[i] = nan;
            series.tm02[i] = nan;
            ++flagged;
        }
    }
    return flagged;
}

} // namespace wavesim::steepness
