#include "wavesim/stats.hpp"

#include "wavesim/error.hpp"
#include "wavesim/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace wavesim::stats {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

} // namespace

// ---------------------------------------------------------------- ECDF / PIT

EmpiricalCdf::EmpiricalCdf(std::vector<double> sample) {
    sample.erase(std::remove_if(sample.begin(), sample.end(), [](double v) { return std::isnan(v); }),
                 sample.end());
    if (sample.size() < 2) {
        throw SizeError("empirical CDF needs at least two values");
    }
    std::sort(sample.begin(), sample.end());
    sorted_ = std::move(sample);
}

double EmpiricalCdf::eval(double x) const {
    const auto n = sorted_.size();
    auto count = static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin());
    count = std::clamp<std::size_t>(count, 1, n);
    return static_cast<double>(count) / static_cast<double>(n + 1);
}

double EmpiricalCdf::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) {
        throw DomainError("ECDF quantile requires u in (0, 1)");
    }
    const auto n = sorted_.size();
    // smallest k with k / (n + 1) >= u, tolerant of round-off from a normal round trip
    auto k = static_cast<std::size_t>(std::ceil(u * static_cast<double>(n + 1) - 1e-6));
    k = std::clamp<std::size_t>(k, 1, n);
    return sorted_[k - 1];
}

std::vector<double> pit_normalize(std::span<const double> x, const EmpiricalCdf& cdf) {
    std::vector<double> y(x.size());
    std::transform(x.begin(), x.end(), y.begin(), [&](double v) {
        return std::isnan(v) ? kNaN : numeric::normal_quantile(cdf.eval(v));
    });
    return y;
}

std::vector<double> pit_inverse(std::span<const double> y, const EmpiricalCdf& cdf) {
    std::vector<double> x(y.size());
    std::transform(y.begin(), y.end(), x.begin(), [&](double v) {
        if (std::isnan(v)) {
            return kNaN;
        }
        const double u = std::clamp(numeric::normal_cdf(v), 1e-300, 1.0 - 1e-16);
        return cdf.quantile(u);
    });
    return x;
}

// ---------------------------------------------------------------- skew t

namespace {

struct SkewTConstants {
    double m1;
    double mu_shift;
    double sigma_scale;
    double g;
    double t_scale; // sqrt(nu / (nu - 2))
};

SkewTConstants skew_t_constants(double xi, double nu) {
    const double log_beta = std::lgamma(0.5) + std::lgamma(0.5 * nu) - std::lgamma(0.5 * (nu + 1.0));
    const double m1 = 2.0 * std::sqrt(nu - 2.0) / (nu - 1.0) / std::exp(log_beta);
    const double mu_shift = m1 * (xi - 1.0 / xi);
    const double sigma_scale =
        std::sqrt((1.0 - m1 * m1) * (xi * xi + 1.0 / (xi * xi)) + 2.0 * m1 * m1 - 1.0);
    return {m1, mu_shift, sigma_scale, 2.0 / (xi + 1.0 / xi), std::sqrt(nu / (nu - 2.0))};
}

} // namespace

void SkewTParams::validate() const {
    if (!(sigma > 0.0) || !(skew > 0.0) || !(shape > 2.0) || !std::isfinite(mu) || !std::isfinite(sigma) ||
        !std::isfinite(skew) || !std::isfinite(shape)) {
        throw DomainError("skew-t parameters require sigma > 0, skew > 0, shape > 2");
    }
}

double skew_t_logpdf(const SkewTParams& p, double x) {
    const auto k = skew_t_constants(p.skew, p.shape);
    const double z = (x - p.mu) / p.sigma * k.sigma_scale + k.mu_shift;
    const double xi_pow = z >= 0.0 ? p.skew : 1.0 / p.skew;
    const double w = z / xi_pow * k.t_scale;
    return std::log(k.g) + t_log_pdf(w, p.shape) + std::log(k.t_scale) + std::log(k.sigma_scale) -
           std::log(p.sigma);
}

double skew_t_cdf(const SkewTParams& p, double x) {
    const auto k = skew_t_constants(p.skew, p.shape);
    const double z = (x - p.mu) / p.sigma * k.sigma_scale + k.mu_shift;
    if (z >= 0.0) {
        return 1.0 - k.g * p.skew * t_cdf(-z / p.skew * k.t_scale, p.shape);
    }
    return k.g / p.skew * t_cdf(z * p.skew * k.t_scale, p.shape);
}

double skew_t_quantile(const SkewTParams& p, double u) {
    if (!(u > 0.0 && u < 1.0)) {
        throw DomainError("skew-t quantile requires u in (0, 1)");
    }
    const auto k = skew_t_constants(p.skew, p.shape);
    const double xi = p.skew;
    const double p0 = 1.0 / (1.0 + xi * xi);
    double z = 0.0;
    if (u < p0) {
        z = t_quantile(u * xi / k.g, p.shape) / k.t_scale / xi;
    } else {
        const double q = std::min((1.0 - u) / (k.g * xi), 0.5);
        z = q >= 0.5 ? 0.0 : -xi * t_quantile(q, p.shape) / k.t_scale;
    }
    return p.mu + p.sigma * (z - k.mu_shift) / k.sigma_scale;
}

namespace {

double skew_t_total_loglik(std::span<const double> xs, const SkewTParams& p) {
    if (!(p.sigma > 0.0) || !(p.skew > 0.0) || !(p.shape > 2.0) || p.shape > 1e4 || p.skew > 50.0 ||
        p.skew < 0.02) {
        return -std::numeric_limits<double>::infinity();
    }
    const auto k = skew_t_constants(p.skew, p.shape);
    const double nu = p.shape;
    const double constant = std::log(k.g) + std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                            0.5 * std::log(nu * std::numbers::pi) + std::log(k.t_scale) +
                            std::log(k.sigma_scale) - std::log(p.sigma);
    const double inv_sigma = k.sigma_scale / p.sigma;
    const double pos = k.t_scale / p.skew;
    const double neg = k.t_scale * p.skew;
    double acc = 0.0;
    for (double x : xs) {
        const double z = (x - p.mu) * inv_sigma + k.mu_shift;
        const double w = z * (z >= 0.0 ? pos : neg);
        acc += std::log1p(w * w / nu);
    }
    return static_cast<double>(xs.size()) * constant - 0.5 * (nu + 1.0) * acc;
}

} // namespace

SkewTFit fit_skew_t(std::span<const double> sample) {
    std::vector<double> xs;
    xs.reserve(sample.size());
    for (double v : sample) {
        if (std::isfinite(v)) {
            xs.push_back(v);
        }
    }
    if (xs.size() < 50) {
        throw SizeError("skew-t fit needs at least 50 values, got " + std::to_string(xs.size()));
    }
    const double m = mean(xs);
    const double sd = stddev(xs);
    if (!(sd > 0.0)) {
        throw FitError("skew-t fit on a constant sample");
    }

    // symmetric warm start over (mu, log sigma, log(shape - 2))
    auto symmetric = [&](std::span<const double> v) {
        SkewTParams p{v[0], std::exp(v[1]), 1.0, 2.0 + std::exp(v[2])};
        return -skew_t_total_loglik(xs, p);
    };
    numeric::NelderMeadOptions opts;
    opts.step = {0.1 * sd, 0.1, 0.5};
    opts.max_evaluations = 3000;
    numeric::MinimizeResult warm;
    warm.value = std::numeric_limits<double>::infinity();
    for (double nu0 : {4.0, 8.0, 30.0}) {
        auto r = numeric::nelder_mead(symmetric, {m, std::log(sd), std::log(nu0 - 2.0)}, opts);
        if (r.value < warm.value) {
            warm = std::move(r);
        }
    }

    auto full = [&](std::span<const double> v) {
        SkewTParams p{v[0], std::exp(v[1]), std::exp(v[2]), 2.0 + std::exp(v[3])};
        return -skew_t_total_loglik(xs, p);
    };
    numeric::NelderMeadOptions full_opts;
    full_opts.step = {0.1 * sd, 0.1, 0.1, 0.3};
    full_opts.max_evaluations = 6000;
    full_opts.f_tolerance = 1e-12;
    auto best = numeric::nelder_mead_restarted(full, {warm.x[0], warm.x[1], 0.0, warm.x[2]}, full_opts);
    if (!std::isfinite(best.value)) {
        throw FitError("skew-t likelihood is not finite at any explored point");
    }
    SkewTFit fit;
    fit.params = {best.x[0], std::exp(best.x[1]), std::exp(best.x[2]), 2.0 + std::exp(best.x[3])};
    fit.log_likelihood = -best.value;
    if (fit.params.shape < 2.05) {
        fit.shape_at_boundary = true;
        fit.params.shape = 2.05;
    }
    return fit;
}

// ---------------------------------------------------------------- Kendall

namespace {

// Counts strict inversions of v while merge-sorting it.
std::uint64_t merge_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) {
        return 0;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
    std::size_t i = lo;
    std::size_t j = mid;
    std::size_t k = lo;
    while (i < mid && j < hi) {
        if (v[i] <= v[j]) {
            buf[k++] = v[i++];
        } else {
            swaps += mid - i;
            buf[k++] = v[j++];
        }
    }
    while (i < mid) {
        buf[k++] = v[i++];
    }
    while (j < hi) {
        buf[k++] = v[j++];
    }
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return swaps;
}

double tie_pairs(std::span<const double> sorted) {
    double total = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i + 1;
        while (j < sorted.size() && sorted[j] == sorted[i]) {
            ++j;
        }
        const double t = static_cast<double>(j - i);
        total += t * (t - 1.0) / 2.0;
        i = j;
    }
    return total;
}

} // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw SizeError("kendall_tau: arrays differ in length");
    }
    const std::size_t n = x.size();
    if (n < 2) {
        throw SizeError("kendall_tau needs at least two pairs");
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
    });
    std::vector<double> xs(n);
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = x[idx[i]];
        ys[i] = y[idx[i]];
    }
    const double n0 = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    const double n1 = tie_pairs(xs);
    double n3 = 0.0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i + 1;
            while (j < n && xs[j] == xs[i] && ys[j] == ys[i]) {
                ++j;
            }
            const double t = static_cast<double>(j - i);
            n3 += t * (t - 1.0) / 2.0;
            i = j;
        }
    }
    std::vector<double> buf(n);
    const auto swaps = static_cast<double>(merge_count(ys, buf, 0, n));
    const double n2 = tie_pairs(ys);
    const double denom = std::sqrt((n0 - n1) * (n0 - n2));
    if (!(denom > 0.0)) {
        throw DomainError("kendall_tau undefined: a margin is constant");
    }
    return (n0 - n1 - n2 + n3 - 2.0 * swaps) / denom;
}

IndependenceTest tau_independence_test(std::span<const double> x, std::span<const double> y, double alpha) {
    if (x.size() < 10) {
        throw SizeError("independence test needs at least 10 pairs");
    }
    IndependenceTest t;
    const double n = static_cast<double>(x.size());
    t.tau = kendall_tau(x, y);
    t.statistic = t.tau * std::sqrt(9.0 * n * (n - 1.0) / (2.0 * (2.0 * n + 5.0)));
    t.p_value = std::min(1.0, 2.0 * (1.0 - numeric::normal_cdf(std::abs(t.statistic))));
    t.independent = t.p_value >= alpha;
    return t;
}

// ---------------------------------------------------------------- KS

double kolmogorov_survival(double lambda) {
    if (!(lambda > 0.0)) {
        return 1.0;
    }
    if (lambda < 1.18) {
        const double pi2 = std::numbers::pi * std::numbers::pi;
        double sum = 0.0;
        for (int k = 1; k <= 50; ++k) {
            const double odd = 2.0 * k - 1.0;
            const double term = std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
            sum += term;
            if (term < 1e-17) {
                break;
            }
        }
        return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) {
            break;
        }
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    auto clean = [](std::span<const double> s) {
        std::vector<double> v;
        v.reserve(s.size());
        for (double x : s) {
            if (!std::isnan(x)) {
                v.push_back(x);
            }
        }
        std::sort(v.begin(), v.end());
        return v;
    };
    const auto xa = clean(a);
    const auto xb = clean(b);
    if (xa.empty() || xb.empty()) {
        throw SizeError("KS test needs two non-empty samples");
    }
    const double na = static_cast<double>(xa.size());
    const double nb = static_cast<double>(xb.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < xa.size() && j < xb.size()) {
        const double v = std::min(xa[i], xb[j]);
        while (i < xa.size() && xa[i] == v) {
            ++i;
        }
        while (j < xb.size() && xb[j] == v) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    return {d, kolmogorov_survival(std::sqrt(ne) * d)};
}

// ---------------------------------------------------------------- KDE

std::vector<double> kde_density(std::span<const double> sample, std::span<const double> grid, double bandwidth) {
    if (!(bandwidth > 0.0)) {
        throw DomainError("KDE bandwidth must be positive");
    }
    std::vector<double> xs;
    xs.reserve(sample.size());
    for (double v : sample) {
        if (std::isfinite(v)) {
            xs.push_back(v);
        }
    }
    if (xs.empty()) {
        throw SizeError("KDE of an empty sample");
    }
    std::sort(xs.begin(), xs.end());
    const double reach = 9.0 * bandwidth;
    const double norm = 1.0 / (static_cast<double>(xs.size()) * bandwidth);
    std::vector<double> out(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto lo = std::lower_bound(xs.begin(), xs.end(), grid[g] - reach);
        const auto hi = std::upper_bound(lo, xs.end(), grid[g] + reach);
        double acc = 0.0;
        for (auto it = lo; it != hi; ++it) {
            acc += numeric::normal_pdf((grid[g] - *it) / bandwidth);
        }
        out[g] = acc * norm;
    }
    return out;
}

double silverman_bandwidth(std::span<const double> sample) {
    std::vector<double> xs;
    for (double v : sample) {
        if (std::isfinite(v)) {
            xs.push_back(v);
        }
    }
    if (xs.size() < 2) {
        throw SizeError("bandwidth selection needs at least two values");
    }
    const double sd = stddev(xs) * std::sqrt(static_cast<double>(xs.size()) / static_cast<double>(xs.size() - 1));
    const double iqr = sample_quantile(xs, 0.75) - sample_quantile(xs, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) {
        spread = sd > 0.0 ? sd : 1.0;
    }
    return 0.9 * spread * std::pow(static_cast<double>(xs.size()), -0.2);
}

// ---------------------------------------------------------------- helpers

std::vector<double> pseudo_observations(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> u(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && x[idx[j]] == x[idx[i]]) {
            ++j;
        }
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            u[idx[k]] = avg_rank / static_cast<double>(n + 1);
        }
        i = j;
    }
    return u;
}

double mean(std::span<const double> x) {
    if (x.empty()) {
        return kNaN;
    }
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
    const double m = mean(x);
    double acc = 0.0;
    for (double v : x) {
        acc += (v - m) * (v - m);
    }
    return std::sqrt(acc / static_cast<double>(x.size()));
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw SizeError("correlation needs two equally long samples of size >= 2");
    }
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) {
        return 0.0;
    }
    return sxy / std::sqrt(sxx * syy);
}

double skewness(std::span<const double> x) {
    const double m = mean(x);
    double m2 = 0.0;
    double m3 = 0.0;
    for (double v : x) {
        const double d = v - m;
        m2 += d * d;
        m3 += d * d * d;
    }
    const double n = static_cast<double>(x.size());
    m2 /= n;
    m3 /= n;
    return m3 / std::pow(m2, 1.5);
}

double sample_quantile(std::vector<double> x, double q) {
    if (x.empty()) {
        throw SizeError("quantile of an empty sample");
    }
    std::sort(x.begin(), x.end());
    const double h = (static_cast<double>(x.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, x.size() - 1);
    return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

} // namespace wavesim::stats
