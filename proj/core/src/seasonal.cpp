#include "wavesim/seasonal.hpp"

#include "wavesim/calendar.hpp"
#include "wavesim/error.hpp"
#include "wavesim/stats.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <numbers>

namespace wavesim::seasonal {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kOmega = 2.0 * std::numbers::pi / static_cast<double>(kHoursPerYear);
constexpr std::size_t kYear = static_cast<std::size_t>(kHoursPerYear);

void check_smoothing_args(std::size_t n, int bandwidth) {
    if (bandwidth < 2) {
        throw DomainError(fmt::format("smoothing bandwidth must be >= 2 hours, got {}", bandwidth));
    }
    if (n <= static_cast<std::size_t>(bandwidth)) {
        throw SizeError(fmt::format("series of {} hours is not longer than the bandwidth {}", n, bandwidth));
    }
}

std::vector<double> kernel_weights(int bandwidth) {
    const double h = 0.5 * bandwidth;
    const int reach = static_cast<int>(std::ceil(h));
    std::vector<double> w(2 * reach + 1);
    for (int d = -reach; d <= reach; ++d) {
        w[d + reach] = epanechnikov(d / h);
    }
    return w;
}

// Weighted average of f(k) over the window around each t; f returns NaN to skip.
template <typename F>
std::vector<double> kernel_average(std::size_t n, int bandwidth, F&& f) {
    const auto w = kernel_weights(bandwidth);
    const auto reach = static_cast<std::ptrdiff_t>(w.size() / 2);
    const auto len = static_cast<std::ptrdiff_t>(n);
    std::vector<double> values(n);
    for (std::size_t k = 0; k < n; ++k) {
        values[k] = f(k);
    }
    std::vector<double> out(n);
    for (std::ptrdiff_t t = 0; t < len; ++t) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, t - reach);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len - 1, t + reach);
        double sw = 0.0;
        double swy = 0.0;
        for (std::ptrdiff_t k = lo; k <= hi; ++k) {
            const double v = values[static_cast<std::size_t>(k)];
            if (std::isnan(v)) {
                continue;
            }
            const double wk = w[static_cast<std::size_t>(k - t + reach)];
            sw += wk;
            swy += wk * v;
        }
        out[static_cast<std::size_t>(t)] = sw > 0.0 ? swy / sw : kNaN;
    }
    return out;
}

} // namespace

double epanechnikov(double u) { return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0; }

std::vector<double> smooth_mean(std::span<const double> y, int bandwidth) {
    check_smoothing_args(y.size(), bandwidth);
    return kernel_average(y.size(), bandwidth, [&](std::size_t k) { return y[k]; });
}

std::vector<double> smooth_std(std::span<const double> y, std::span<const double> mu, int bandwidth) {
    check_smoothing_args(y.size(), bandwidth);
    if (mu.size() != y.size()) {
        throw SizeError("smooth_std: mean series length differs from data");
    }
    auto var = kernel_average(y.size(), bandwidth, [&](std::size_t k) {
        const double d = y[k] - mu[k];
        return d * d;
    });
    for (double& v : var) {
        if (!std::isnan(v)) {
            v = std::max(std::sqrt(v), kSigmaFloor);
        }
    }
    return var;
}

std::vector<double> standardize(std::span<const double> y, std::span<const double> mu,
                                std::span<const double> sigma) {
    if (mu.size() != y.size() || sigma.size() != y.size()) {
        throw SizeError("standardize: series lengths differ");
    }
    std::vector<double> z(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        z[i] = (y[i] - mu[i]) / sigma[i];
    }
    return z;
}

std::vector<double> destandardize(std::span<const double> z, std::span<const double> mu,
                                  std::span<const double> sigma) {
    if (mu.size() != z.size() || sigma.size() != z.size()) {
        throw SizeError("destandardize: series lengths differ");
    }
    std::vector<double> y(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        y[i] = mu[i] + sigma[i] * z[i];
    }
    return y;
}

// ---- Fourier ---------------------------------------------------------------

double fourier_eval(const FourierCoefficients& a, double t) {
    const double x = kOmega * t;
    return a[0] + a[1] * std::cos(x) + a[2] * std::sin(x) + a[3] * std::cos(2.0 * x) + a[4] * std::sin(2.0 * x);
}

FourierFit fit_fourier_year(std::span<const double> segment) {
    if (segment.size() != kYear) {
        throw SizeError(fmt::format("Fourier fit expects {} hourly values, got {}", kYear, segment.size()));
    }
    std::vector<std::size_t> rows;
    for (std::size_t t = 0; t < kYear; ++t) {
        if (std::isfinite(segment[t])) {
            rows.push_back(t);
        }
    }
    if (rows.size() < 100) {
        throw SizeError(fmt::format("Fourier fit needs 100 present values, got {}", rows.size()));
    }
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), 5);
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        const double x = kOmega * static_cast<double>(rows[static_cast<std::size_t>(r)]);
        X.row(r) << 1.0, std::cos(x), std::sin(x), std::cos(2.0 * x), std::sin(2.0 * x);
        y[r] = segment[rows[static_cast<std::size_t>(r)]];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < 5) {
        throw FitError("Fourier design is rank deficient for this missing-data pattern");
    }
    const Eigen::VectorXd beta = qr.solve(y);
    FourierFit fit;
    for (int k = 0; k < 5; ++k) {
        fit.coefficients[static_cast<std::size_t>(k)] = beta[k];
    }
    const double sse = (y - X * beta).squaredNorm();
    const double sst = (y.array() - y.mean()).square().sum();
    fit.r_squared = sst > 0.0 ? 1.0 - sse / sst : 1.0;
    return fit;
}

std::vector<double> concat_smooth(std::span<const FourierCoefficients> years, int half_width) {
    if (years.empty()) {
        throw SizeError("concat_smooth needs at least one year");
    }
    if (half_width < 0 || 2 * static_cast<std::int64_t>(half_width) > kHoursPerYear) {
        throw DomainError("concat_smooth half-width out of range");
    }
    std::vector<double> out(years.size() * kYear);
    for (std::size_t y = 0; y < years.size(); ++y) {
        for (std::size_t t = 0; t < kYear; ++t) {
            out[y * kYear + t] = fourier_eval(years[y], static_cast<double>(t));
        }
    }
    const auto h = static_cast<std::ptrdiff_t>(half_width);
    if (h == 0) {
        return out;
    }
    for (std::size_t y = 0; y + 1 < years.size(); ++y) {
        const auto boundary = static_cast<std::ptrdiff_t>((y + 1) * kYear);
        for (std::ptrdiff_t d = -h; d < h; ++d) {
            // both curves are periodic, so each extends naturally past the boundary
            const double tau = static_cast<double>(d);
            const double left = fourier_eval(years[y], tau);
            const double right = fourier_eval(years[y + 1], tau);
            const double x = static_cast<double>(d + h) / static_cast<double>(2 * h);
            const double s = x * x * (3.0 - 2.0 * x);
            out[static_cast<std::size_t>(boundary + d)] = (1.0 - s) * left + s * right;
        }
    }
    return out;
}

// ---- coefficient model -----------------------------------------------------

namespace {

constexpr std::array<const char*, kProcessCount> kProcessNames{"mu_hm0", "sigma_hm0", "mu_tm02", "sigma_tm02"};

bool is_positive_definite(const Eigen::MatrixXd& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    return llt.info() == Eigen::Success;
}

Eigen::MatrixXd build_correlation(const std::vector<Correlation>& list) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(kCoefficientCount, kCoefficientCount);
    for (const auto& c : list) {
        r(c.i, c.j) = c.rho;
        r(c.j, c.i) = c.rho;
    }
    return r;
}

} // namespace

std::string coefficient_name(int index) {
    if (index < 0 || index >= kCoefficientCount) {
        throw DomainError(fmt::format("coefficient index {} out of range", index));
    }
    return fmt::format("{}.a{}", kProcessNames[static_cast<std::size_t>(index / 5)], index % 5);
}

int coefficient_from_name(const std::string& name) {
    for (int i = 0; i < kCoefficientCount; ++i) {
        if (coefficient_name(i) == name) {
            return i;
        }
    }
    throw ConfigError(fmt::format("unknown seasonal coefficient '{}'", name));
}

Eigen::MatrixXd CoefficientModel::correlation_matrix() const { return build_correlation(correlations); }

void CoefficientModel::validate() const {
    for (int i = 0; i < kCoefficientCount; ++i) {
        if (!std::isfinite(mean[static_cast<std::size_t>(i)]) || !(sd[static_cast<std::size_t>(i)] >= 0.0)) {
            throw DomainError(fmt::format("coefficient {} has an invalid margin", coefficient_name(i)));
        }
    }
    for (const auto& c : correlations) {
        if (c.i < 0 || c.j < 0 || c.i >= kCoefficientCount || c.j >= kCoefficientCount || c.i == c.j ||
            !(std::abs(c.rho) < 1.0)) {
            throw DomainError("invalid coefficient correlation entry");
        }
    }
    if (!is_positive_definite(correlation_matrix())) {
        throw DomainError("coefficient correlation matrix is not positive definite");
    }
}

CoefficientModel fit_coefficient_model(std::span<const CoefficientVector> years, double alpha) {
    if (years.size() < 3) {
        throw SizeError(fmt::format("coefficient model needs at least 3 years, got {}", years.size()));
    }
    const std::size_t n = years.size();
    CoefficientModel model;
    std::array<std::vector<double>, kCoefficientCount> columns;
    for (int i = 0; i < kCoefficientCount; ++i) {
        auto& col = columns[static_cast<std::size_t>(i)];
        col.resize(n);
        for (std::size_t y = 0; y < n; ++y) {
            col[y] = years[y][static_cast<std::size_t>(i)];
        }
        model.mean[static_cast<std::size_t>(i)] = stats::mean(col);
        model.sd[static_cast<std::size_t>(i)] = stats::stddev(col);
    }
    // The asymptotic tau test is not usable on fewer than ten years.
    if (n >= 10) {
        for (int k = 0; k < 5; ++k) {
            for (int p = 0; p < kProcessCount; ++p) {
                for (int q = p + 1; q < kProcessCount; ++q) {
                    const int i = coefficient_index(p, k);
                    const int j = coefficient_index(q, k);
                    const auto& a = columns[static_cast<std::size_t>(i)];
                    const auto& b = columns[static_cast<std::size_t>(j)];
                    if (model.sd[static_cast<std::size_t>(i)] <= 0.0 || model.sd[static_cast<std::size_t>(j)] <= 0.0) {
                        continue;
                    }
                    const auto test = stats::tau_independence_test(a, b, alpha);
                    if (!test.independent) {
                        model.correlations.push_back({i, j, stats::pearson_correlation(a, b)});
                    }
                }
            }
        }
    }
    for (int iter = 0; iter < 1000 && !is_positive_definite(model.correlation_matrix()); ++iter) {
        for (auto& c : model.correlations) {
            c.rho *= 0.95;
        }
    }
    return model;
}

std::vector<CoefficientVector> sample_coefficients(const CoefficientModel& model, std::size_t n_years, Rng& rng) {
    Eigen::LLT<Eigen::MatrixXd> llt(model.correlation_matrix());
    if (llt.info() != Eigen::Success) {
        throw DomainError("coefficient correlation matrix is not positive definite");
    }
    const Eigen::MatrixXd L = llt.matrixL();
    std::vector<CoefficientVector> out(n_years);
    Eigen::VectorXd z(kCoefficientCount);
    for (auto& v : out) {
        for (int i = 0; i < kCoefficientCount; ++i) {
            z[i] = rng.normal();
        }
        const Eigen::VectorXd x = L * z;
        for (int i = 0; i < kCoefficientCount; ++i) {
            const auto s = static_cast<std::size_t>(i);
            v[s] = model.mean[s] + model.sd[s] * x[i];
        }
    }
    return out;
}

SeasonalPair build_seasonal_series(std::span<const CoefficientVector> years, Variable variable, int half_width) {
    const int mu_process = variable == Variable::hm0 ? kMuHm0 : kMuTm02;
    const int sigma_process = mu_process + 1;
    auto extract = [&](int process) {
        std::vector<FourierCoefficients> out(years.size());
        for (std::size_t y = 0; y < years.size(); ++y) {
            for (int k = 0; k < 5; ++k) {
                out[y][static_cast<std::size_t>(k)] =
                    years[y][static_cast<std::size_t>(coefficient_index(process, k))];
            }
        }
        return out;
    };
    SeasonalPair pair;
    pair.mu = concat_smooth(extract(mu_process), half_width);
    pair.sigma = concat_smooth(extract(sigma_process), half_width);
    for (double& s : pair.sigma) {
        s = std::max(s, kSigmaFloor);
    }
    return pair;
}

} // namespace wavesim::seasonal
