#pragma once

#include "wavesim/student_t.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace wavesim::stats {

/// Empirical distribution of a training sample with plotting position
/// rank / (n + 1), so evaluation stays strictly inside (0, 1).
class EmpiricalCdf {
public:
    /// Empty; only useful as a placeholder before assignment.
    EmpiricalCdf() = default;
    /// NaNs are dropped. Throws SizeError when fewer than two values remain.
    explicit EmpiricalCdf(std::vector<double> sample);

    /// #{x_i <= x} / (n + 1), clamped to [1 / (n + 1), n / (n + 1)].
    double eval(double x) const;
    /// Smallest sample value x_(k) with k / (n + 1) >= u; saturates at the
    /// sample extremes. Throws DomainError for u outside (0, 1).
    double quantile(double u) const;

    std::size_t size() const { return sorted_.size(); }
    double min() const { return sorted_.front(); }
    double max() const { return sorted_.back(); }
    std::span<const double> sorted_sample() const { return sorted_; }

private:
    std::vector<double> sorted_;
};

/// Phi^-1(F(x)); NaN passes through.
std::vector<double> pit_normalize(std::span<const double> x, const EmpiricalCdf& cdf);
/// F^-1(Phi(y)); NaN passes through.
std::vector<double> pit_inverse(std::span<const double> y, const EmpiricalCdf& cdf);

/// Skewed Student t in the (mean, sd, xi, nu) parameterization of Fernandez
/// and Steel as standardized in R's fGarch::sstd: `mu` is the mean, `sigma`
/// the standard deviation, `skew` = xi (1 = symmetric) and `shape` = nu > 2.
struct SkewTParams {
    double mu = 0.0;
    double sigma = 1.0;
    double skew = 1.0;
    double shape = 10.0;

    /// Throws DomainError when sigma <= 0, skew <= 0 or shape <= 2.
    void validate() const;
};

double skew_t_logpdf(const SkewTParams& p, double x);
double skew_t_cdf(const SkewTParams& p, double x);
/// Throws DomainError for u outside (0, 1).
double skew_t_quantile(const SkewTParams& p, double u);

struct SkewTFit {
    SkewTParams params;
    double log_likelihood = 0.0;
    /// Set when the optimum pressed against the lower shape bound.
    bool shape_at_boundary = false;
};

/// Maximum likelihood over (mu, sigma, skew, shape), warm-started from a
/// symmetric t fit. Throws SizeError below 50 finite values and FitError
/// when the likelihood cannot be optimized.
SkewTFit fit_skew_t(std::span<const double> sample);

/// Kendall's tau-b in O(n log n) (Knight's algorithm). Throws SizeError for
/// fewer than two pairs and DomainError when either margin is constant.
double kendall_tau(std::span<const double> x, std::span<const double> y);

struct IndependenceTest {
    double tau = 0.0;
    double statistic = 0.0;
    double p_value = 1.0;
    bool independent = true;
};

/// Asymptotic test of tau = 0: z = tau sqrt(9 n (n - 1) / (2 (2 n + 5))),
/// two-sided against N(0, 1). Throws SizeError for n < 10.
IndependenceTest tau_independence_test(std::span<const double> x, std::span<const double> y, double alpha);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov with the asymptotic Kolmogorov p-value at
/// effective size n_a n_b / (n_a + n_b). NaNs are ignored.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);
/// One-sample KS against a continuous CDF.
template <typename Cdf>
KsResult ks_one_sample(std::span<const double> sample, Cdf&& cdf);
/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

/// Gaussian kernel density on `grid`. Throws SizeError on an empty sample and
/// DomainError unless bandwidth > 0.
std::vector<double> kde_density(std::span<const double> sample, std::span<const double> grid, double bandwidth);
/// 0.9 min(sd, IQR / 1.34) n^(-1/5).
double silverman_bandwidth(std::span<const double> sample);

/// Average ranks divided by (n + 1).
std::vector<double> pseudo_observations(std::span<const double> x);

double mean(std::span<const double> x);
/// Population (1/n) standard deviation.
double stddev(std::span<const double> x);
double pearson_correlation(std::span<const double> x, std::span<const double> y);
double skewness(std::span<const double> x);
/// Linear-interpolation sample quantile (type 7).
double sample_quantile(std::vector<double> x, double q);

// ---------------------------------------------------------------------------

template <typename Cdf>
KsResult ks_one_sample(std::span<const double> sample, Cdf&& cdf) {
    std::vector<double> xs;
    xs.reserve(sample.size());
    for (double v : sample) {
        if (v == v) {
            xs.push_back(v);
        }
    }
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f));
    }
    return {d, xs.empty() ? 1.0 : kolmogorov_survival(std::sqrt(n) * d)};
}

} // namespace wavesim::stats
