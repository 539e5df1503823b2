#include "wavesim/arma.hpp"

#include "wavesim/error.hpp"
#include "wavesim/numeric.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace wavesim::arma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Roots of 1 + s * (c0 z + c1 z^2 + ...) via the companion matrix of the reversed polynomial.
std::vector<std::complex<double>> polynomial_roots(std::span<const double> c, double s) {
    std::size_t deg = c.size();
    while (deg > 0 && c[deg - 1] == 0.0) {
        --deg;
    }
    if (deg == 0) {
        return {};
    }
    // x^deg + s c0 x^(deg-1) + ... + s c_{deg-1}; its roots are 1 / z.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(deg), static_cast<Eigen::Index>(deg));
    for (std::size_t j = 0; j < deg; ++j) {
        companion(0, static_cast<Eigen::Index>(j)) = -s * c[j];
    }
    for (std::size_t i = 1; i < deg; ++i) {
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    }
    const Eigen::VectorXcd eig = companion.eigenvalues();
    std::vector<std::complex<double>> roots;
    for (Eigen::Index i = 0; i < eig.size(); ++i) {
        roots.push_back(1.0 / eig[i]);
    }
    return roots;
}

bool roots_outside(const std::vector<std::complex<double>>& roots, double tolerance) {
    return std::all_of(roots.begin(), roots.end(),
                       [&](const std::complex<double>& r) { return std::abs(r) > 1.0 + tolerance; });
}

// Maps unconstrained values to coefficients of a stationary AR polynomial
// through partial autocorrelations r = tanh(x).
std::vector<double> from_partials(std::span<const double> x) {
    std::vector<double> phi;
    std::vector<double> prev;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double r = std::tanh(x[k]);
        prev = phi;
        phi.assign(k + 1, 0.0);
        for (std::size_t j = 0; j < k; ++j) {
            phi[j] = prev[j] - r * prev[k - 1 - j];
        }
        phi[k] = r;
    }
    return phi;
}

// Inverse of from_partials; coefficients must be stationary.
std::vector<double> to_partials(std::span<const double> phi_in) {
    std::vector<double> phi(phi_in.begin(), phi_in.end());
    std::vector<double> x(phi.size());
    for (std::size_t k = phi.size(); k-- > 0;) {
        const double r = std::clamp(phi[k], -0.999999, 0.999999);
        x[k] = std::atanh(r);
        std::vector<double> prev(k);
        for (std::size_t j = 0; j < k; ++j) {
            prev[j] = (phi[j] + r * phi[k - 1 - j]) / (1.0 - r * r);
        }
        phi = std::move(prev);
    }
    return x;
}

void shrink_to_region(std::vector<double>& c, bool ma) {
    for (int iter = 0; iter < 200; ++iter) {
        if (ma ? is_invertible(c, 1e-3) : is_stationary(c, 1e-3)) {
            return;
        }
        double f = 1.0;
        for (double& v : c) {
            f *= 0.95;
            v *= f;
        }
    }
    std::fill(c.begin(), c.end(), 0.0);
}

struct FilterTotals {
    double sum_log_f = 0.0;
    double sum_v2_over_f = 0.0;
    std::size_t n = 0;
    bool ok = true;
};

// Kalman filter for the ARMA state-space form with unit innovation variance.
FilterTotals kalman(std::span<const double> phi_in, std::span<const double> theta_in, double mu,
                    std::span<const double> z) {
    const std::size_t r = std::max(phi_in.size(), theta_in.size() + 1);
    std::vector<double> phi(r, 0.0);
    std::vector<double> rvec(r, 0.0);
    std::copy(phi_in.begin(), phi_in.end(), phi.begin());
    rvec[0] = 1.0;
    std::copy(theta_in.begin(), theta_in.end(), rvec.begin() + 1);

    const auto ri = static_cast<Eigen::Index>(r);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(ri, ri);
    for (std::size_t i = 0; i < r; ++i) {
        T(static_cast<Eigen::Index>(i), 0) = phi[i];
        if (i + 1 < r) {
            T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = 1.0;
        }
    }
    const Eigen::VectorXd R = Eigen::Map<const Eigen::VectorXd>(rvec.data(), ri);
    const Eigen::MatrixXd RR = R * R.transpose();

    FilterTotals out;
    // Stationary initial covariance: P = T P T' + R R'.
    Eigen::MatrixXd P;
    {
        const Eigen::MatrixXd kron = Eigen::kroneckerProduct(T, T);
        const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(ri * ri, ri * ri) - kron;
        const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(RR.data(), ri * ri);
        Eigen::VectorXd vecp = lhs.partialPivLu().solve(rhs);
        P = Eigen::Map<Eigen::MatrixXd>(vecp.data(), ri, ri);
        P = 0.5 * (P + P.transpose()).eval();
    }
    std::vector<double> a(r, 0.0);
    std::vector<double> a_upd(r, 0.0);
    std::vector<double> gain(r, 0.0);
    bool steady = false;
    double f_steady = 1.0;
    double log_f_steady = 0.0;

    auto advance = [&](const std::vector<double>& src) {
        for (std::size_t i = 0; i < r; ++i) {
            a[i] = phi[i] * src[0] + (i + 1 < r ? src[i + 1] : 0.0);
        }
    };

    for (double y : z) {
        if (std::isnan(y)) {
            advance(a);
            P = (T * P * T.transpose() + RR).eval();
            steady = false;
            continue;
        }
        const double v = y - mu - a[0];
        if (steady) {
            out.sum_log_f += log_f_steady;
            out.sum_v2_over_f += v * v / f_steady;
            ++out.n;
            for (std::size_t i = 0; i < r; ++i) {
                a_upd[i] = a[i] + gain[i] * v;
            }
            advance(a_upd);
            continue;
        }
        const double f = P(0, 0);
        if (!(f > 0.0) || !std::isfinite(f)) {
            out.ok = false;
            return out;
        }
        out.sum_log_f += std::log(f);
        out.sum_v2_over_f += v * v / f;
        ++out.n;
        const Eigen::VectorXd pc = P.col(0);
        for (std::size_t i = 0; i < r; ++i) {
            gain[i] = pc[static_cast<Eigen::Index>(i)] / f;
            a_upd[i] = a[i] + gain[i] * v;
        }
        advance(a_upd);
        const Eigen::MatrixXd p_upd = P - pc * pc.transpose() / f;
        Eigen::MatrixXd p_next = T * p_upd * T.transpose() + RR;
        if ((p_next - P).cwiseAbs().maxCoeff() < 1e-13) {
            steady = true;
            // next step's gain and F come from p_next, which equals P to rounding
            f_steady = p_next(0, 0);
            log_f_steady = std::log(f_steady);
            for (std::size_t i = 0; i < r; ++i) {
                gain[i] = p_next(static_cast<Eigen::Index>(i), 0) / f_steady;
            }
        }
        P = std::move(p_next);
    }
    return out;
}

double concentrated_loglik(const FilterTotals& t) {
    if (!t.ok || t.n == 0) {
        return -kInf;
    }
    const double n = static_cast<double>(t.n);
    const double s2 = t.sum_v2_over_f / n;
    if (!(s2 > 0.0)) {
        return -kInf;
    }
    return -0.5 * (n * std::log(2.0 * std::numbers::pi * s2) + t.sum_log_f + n);
}

struct Ols {
    std::vector<double> beta;
    bool ok = false;
};

// Least squares of y on columns built by row(t) for rows where every entry is finite.
template <typename RowFn>
Ols least_squares(std::size_t n, std::size_t k, RowFn&& row) {
    std::vector<double> rows;
    std::vector<double> ys;
    std::vector<double> buf(k + 1);
    for (std::size_t t = 0; t < n; ++t) {
        if (!row(t, buf)) {
            continue;
        }
        if (!std::all_of(buf.begin(), buf.end(), [](double v) { return std::isfinite(v); })) {
            continue;
        }
        ys.push_back(buf[0]);
        rows.insert(rows.end(), buf.begin() + 1, buf.end());
    }
    Ols out;
    if (ys.size() < k + 10) {
        return out;
    }
    const auto m = static_cast<Eigen::Index>(ys.size());
    const auto kk = static_cast<Eigen::Index>(k);
    Eigen::MatrixXd X = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        rows.data(), m, kk);
    Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(ys.data(), m);
    const Eigen::VectorXd b = X.colPivHouseholderQr().solve(y);
    out.beta.assign(b.data(), b.data() + b.size());
    out.ok = b.allFinite();
    return out;
}

struct StartValues {
    double mu = 0.0;
    std::vector<double> ar;
    std::vector<double> ma;
};

// Hannan-Rissanen two-stage regression.
StartValues hannan_rissanen(std::span<const double> z, int p, int q) {
    StartValues s;
    double sum = 0.0;
    std::size_t cnt = 0;
    for (double v : z) {
        if (std::isfinite(v)) {
            sum += v;
            ++cnt;
        }
    }
    s.mu = cnt ? sum / static_cast<double>(cnt) : 0.0;
    s.ar.assign(static_cast<std::size_t>(p), 0.0);
    s.ma.assign(static_cast<std::size_t>(q), 0.0);
    if (p == 0 && q == 0) {
        return s;
    }
    const std::size_t n = z.size();
    std::vector<double> d(n);
    for (std::size_t t = 0; t < n; ++t) {
        d[t] = z[t] - s.mu;
    }
    std::vector<double> eps(n, kNaN);
    if (q > 0) {
        const std::size_t m = static_cast<std::size_t>(std::max(p, q) + 10);
        const auto long_ar = least_squares(n, m, [&](std::size_t t, std::vector<double>& row) {
            if (t < m) {
                return false;
            }
            row[0] = d[t];
            for (std::size_t j = 0; j < m; ++j) {
                row[j + 1] = d[t - 1 - j];
            }
            return true;
        });
        if (long_ar.ok) {
            for (std::size_t t = m; t < n; ++t) {
                double pred = 0.0;
                for (std::size_t j = 0; j < m; ++j) {
                    pred += long_ar.beta[j] * d[t - 1 - j];
                }
                eps[t] = d[t] - pred;
            }
        }
    }
    const auto pp = static_cast<std::size_t>(p);
    const auto qq = static_cast<std::size_t>(q);
    const auto fit = least_squares(n, pp + qq, [&](std::size_t t, std::vector<double>& row) {
        if (t < std::max(pp, qq)) {
            return false;
        }
        row[0] = d[t];
        for (std::size_t j = 0; j < pp; ++j) {
            row[1 + j] = d[t - 1 - j];
        }
        for (std::size_t j = 0; j < qq; ++j) {
            row[1 + pp + j] = eps[t - 1 - j];
        }
        return true;
    });
    if (fit.ok) {
        std::copy(fit.beta.begin(), fit.beta.begin() + p, s.ar.begin());
        std::copy(fit.beta.begin() + p, fit.beta.end(), s.ma.begin());
    }
    shrink_to_region(s.ar, false);
    shrink_to_region(s.ma, true);
    return s;
}

std::vector<double> negate(std::vector<double> v) {
    for (double& x : v) {
        x = -x;
    }
    return v;
}

std::size_t count_present(std::span<const double> z) {
    return static_cast<std::size_t>(std::count_if(z.begin(), z.end(), [](double v) { return std::isfinite(v); }));
}

// Conditional residuals; missing entries are replaced by their prediction.
std::vector<double> conditional_residuals(double c, std::span<const double> ar, std::span<const double> ma,
                                          std::span<const double> z) {
    const std::size_t n = z.size();
    std::vector<double> filled(n);
    std::vector<double> eps(n);
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        double pred = c;
        for (std::size_t j = 0; j < ar.size() && j < t; ++j) {
            pred += ar[j] * filled[t - 1 - j];
        }
        for (std::size_t j = 0; j < ma.size() && j < t; ++j) {
            pred += ma[j] * eps[t - 1 - j];
        }
        if (std::isnan(z[t])) {
            filled[t] = pred;
            eps[t] = 0.0;
            out[t] = kNaN;
        } else {
            filled[t] = z[t];
            eps[t] = z[t] - pred;
            out[t] = eps[t];
        }
    }
    return out;
}

} // namespace

// ---- model -----------------------------------------------------------------

double ArmaModel::mean() const {
    return intercept / (1.0 - std::accumulate(ar.begin(), ar.end(), 0.0));
}

void ArmaModel::validate() const {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2) || !std::isfinite(intercept)) {
        throw DomainError("ARMA model needs a finite intercept and sigma2 > 0");
    }
    if (!is_stationary(ar)) {
        throw DomainError("ARMA model is not stationary: an AR root lies on or inside the unit circle");
    }
    if (!is_invertible(ma)) {
        throw DomainError("ARMA model is not invertible: an MA root lies on or inside the unit circle");
    }
}

std::vector<std::complex<double>> ar_roots(std::span<const double> ar) { return polynomial_roots(ar, -1.0); }
std::vector<std::complex<double>> ma_roots(std::span<const double> ma) { return polynomial_roots(ma, 1.0); }

bool is_stationary(std::span<const double> ar, double tolerance) {
    if (!std::all_of(ar.begin(), ar.end(), [](double v) { return std::isfinite(v); })) {
        return false;
    }
    return roots_outside(ar_roots(ar), tolerance);
}

bool is_invertible(std::span<const double> ma, double tolerance) {
    if (!std::all_of(ma.begin(), ma.end(), [](double v) { return std::isfinite(v); })) {
        return false;
    }
    return roots_outside(ma_roots(ma), tolerance);
}

// ---- correlation functions -------------------------------------------------

std::vector<double> acf(std::span<const double> x, int max_lag) {
    if (max_lag < 0 || x.size() <= static_cast<std::size_t>(max_lag) + 1) {
        throw SizeError(fmt::format("acf: series of length {} too short for lag {}", x.size(), max_lag));
    }
    double sum = 0.0;
    std::size_t n = 0;
    for (double v : x) {
        if (std::isfinite(v)) {
            sum += v;
            ++n;
        }
    }
    if (n < 2) {
        throw SizeError("acf: fewer than two present values");
    }
    const double m = sum / static_cast<double>(n);
    std::vector<double> out(static_cast<std::size_t>(max_lag) + 1);
    for (int k = 0; k <= max_lag; ++k) {
        double acc = 0.0;
        for (std::size_t t = 0; t + static_cast<std::size_t>(k) < x.size(); ++t) {
            const double a = x[t];
            const double b = x[t + static_cast<std::size_t>(k)];
            if (std::isfinite(a) && std::isfinite(b)) {
                acc += (a - m) * (b - m);
            }
        }
        out[static_cast<std::size_t>(k)] = acc / static_cast<double>(n);
    }
    const double c0 = out[0];
    if (!(c0 > 0.0)) {
        throw DomainError("acf undefined for a constant series");
    }
    for (double& v : out) {
        v /= c0;
    }
    return out;
}

std::vector<double> pacf(std::span<const double> x, int max_lag) {
    const auto rho = acf(x, max_lag);
    std::vector<double> out;
    std::vector<double> phi;
    for (int k = 1; k <= max_lag; ++k) {
        double num = rho[static_cast<std::size_t>(k)];
        double den = 1.0;
        for (int j = 1; j < k; ++j) {
            num -= phi[static_cast<std::size_t>(j - 1)] * rho[static_cast<std::size_t>(k - j)];
            den -= phi[static_cast<std::size_t>(j - 1)] * rho[static_cast<std::size_t>(j)];
        }
        const double a = num / den;
        std::vector<double> next(static_cast<std::size_t>(k));
        for (int j = 1; j < k; ++j) {
            next[static_cast<std::size_t>(j - 1)] =
                phi[static_cast<std::size_t>(j - 1)] - a * phi[static_cast<std::size_t>(k - j - 1)];
        }
        next[static_cast<std::size_t>(k - 1)] = a;
        phi = std::move(next);
        out.push_back(a);
    }
    return out;
}

// ---- likelihood and fitting --------------------------------------------------

double log_likelihood(const ArmaModel& model, std::span<const double> z) {
    const auto totals = kalman(model.ar, model.ma, model.mean(), z);
    if (!totals.ok || totals.n == 0) {
        return -kInf;
    }
    const double n = static_cast<double>(totals.n);
    return -0.5 * (n * std::log(2.0 * std::numbers::pi * model.sigma2) + totals.sum_log_f +
                   totals.sum_v2_over_f / model.sigma2);
}

ArmaModel fit_arma(std::span<const double> z, int p, int q) {
    if (p < 0 || q < 0) {
        throw DomainError("ARMA orders must be non-negative");
    }
    const std::size_t present = count_present(z);
    if (present < 50 * static_cast<std::size_t>(p + q + 1)) {
        throw SizeError(fmt::format("ARMA({}, {}) fit needs {} present values, got {}", p, q, 50 * (p + q + 1),
                                    present));
    }
    const auto pp = static_cast<std::size_t>(p);
    const auto qq = static_cast<std::size_t>(q);
    const auto start = hannan_rissanen(z, p, q);

    double scale = 0.0;
    {
        double s = 0.0;
        for (double v : z) {
            if (std::isfinite(v)) {
                s += (v - start.mu) * (v - start.mu);
            }
        }
        scale = std::sqrt(s / static_cast<double>(present));
    }
    if (!(scale > 0.0)) {
        throw FitError("ARMA fit on a constant series");
    }

    auto unpack = [&](std::span<const double> x, std::vector<double>& ar, std::vector<double>& ma) {
        ar = from_partials(x.subspan(1, pp));
        ma = negate(from_partials(x.subspan(1 + pp, qq)));
    };
    auto objective = [&](std::span<const double> x) {
        std::vector<double> ar;
        std::vector<double> ma;
        unpack(x, ar, ma);
        return -concentrated_loglik(kalman(ar, ma, x[0], z));
    };

    std::vector<double> x0{start.mu};
    for (double v : to_partials(start.ar)) {
        x0.push_back(v);
    }
    for (double v : to_partials(negate(start.ma))) {
        x0.push_back(v);
    }
    numeric::NelderMeadOptions opts;
    opts.step.assign(x0.size(), 0.3);
    opts.step[0] = 0.1 * scale;
    opts.max_evaluations = 3000;
    opts.f_tolerance = 1e-9;
    opts.x_tolerance = 1e-8;
    auto best = numeric::nelder_mead_restarted(objective, x0, opts, 4);
    if (!std::isfinite(best.value)) {
        throw FitError(fmt::format("ARMA({}, {}) likelihood is not finite at any explored point", p, q));
    }

    ArmaModel model;
    unpack(best.x, model.ar, model.ma);
    const double mu = best.x[0];
    model.intercept = mu * (1.0 - std::accumulate(model.ar.begin(), model.ar.end(), 0.0));
    const auto totals = kalman(model.ar, model.ma, mu, z);
    model.sigma2 = totals.sum_v2_over_f / static_cast<double>(totals.n);
    model.log_likelihood = concentrated_loglik(totals);
    if (!is_stationary(model.ar) || !is_invertible(model.ma)) {
        throw FitError(fmt::format("ARMA({}, {}) optimum sits on the stationarity or invertibility boundary", p, q));
    }

    // standard errors in natural parameters (c, ar, ma)
    std::vector<double> theta{model.intercept};
    theta.insert(theta.end(), model.ar.begin(), model.ar.end());
    theta.insert(theta.end(), model.ma.begin(), model.ma.end());
    auto natural = [&](std::span<const double> x) {
        std::vector<double> ar(x.begin() + 1, x.begin() + 1 + static_cast<std::ptrdiff_t>(pp));
        std::vector<double> ma(x.begin() + 1 + static_cast<std::ptrdiff_t>(pp), x.end());
        if (!is_stationary(ar, 0.0) || !is_invertible(ma, 0.0)) {
            return kInf;
        }
        const double m = x[0] / (1.0 - std::accumulate(ar.begin(), ar.end(), 0.0));
        return -concentrated_loglik(kalman(ar, ma, m, z));
    };
    std::vector<double> steps(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        steps[i] = 1e-4 * std::max(1.0, std::abs(theta[i]));
    }
    steps[0] = 1e-4 * std::max(scale, std::abs(theta[0]));
    const Eigen::MatrixXd H = numeric::numerical_hessian(natural, theta, steps);
    model.standard_errors.assign(theta.size(), kNaN);
    if (H.allFinite()) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
        if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
            const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(H.rows(), H.cols()));
            for (Eigen::Index i = 0; i < cov.rows(); ++i) {
                if (cov(i, i) > 0.0) {
                    model.standard_errors[static_cast<std::size_t>(i)] = std::sqrt(cov(i, i));
                }
            }
        }
    }
    return model;
}

std::vector<double> residuals(const ArmaModel& model, std::span<const double> z) {
    return conditional_residuals(model.intercept, model.ar, model.ma, z);
}

std::vector<double> simulate_arma(const ArmaModel& model, std::span<const double> innovations, std::size_t burn_in) {
    if (innovations.size() < burn_in) {
        throw SizeError("simulate_arma: fewer innovations than burn-in hours");
    }
    const std::size_t n = innovations.size();
    const std::size_t p = model.ar.size();
    const std::size_t q = model.ma.size();
    std::vector<double> zs(n);
    for (std::size_t t = 0; t < n; ++t) {
        double v = model.intercept + innovations[t];
        for (std::size_t j = 0; j < p && j < t; ++j) {
            v += model.ar[j] * zs[t - 1 - j];
        }
        for (std::size_t j = 0; j < q && j < t; ++j) {
            v += model.ma[j] * innovations[t - 1 - j];
        }
        zs[t] = v;
    }
    return {zs.begin() + static_cast<std::ptrdiff_t>(burn_in), zs.end()};
}

LjungBox ljung_box(std::span<const double> res, int lags, int fitted_parameters) {
    if (lags < 1) {
        throw DomainError("Ljung-Box needs at least one lag");
    }
    const auto r = acf(res, lags);
    const double n = static_cast<double>(count_present(res));
    LjungBox out;
    out.lags = lags;
    out.degrees_of_freedom = std::max(1, lags - fitted_parameters);
    for (int k = 1; k <= lags; ++k) {
        const double rk = r[static_cast<std::size_t>(k)];
        out.statistic += rk * rk / (n - k);
    }
    out.statistic *= n * (n + 2.0);
    out.p_value = boost::math::gamma_q(0.5 * out.degrees_of_freedom, 0.5 * out.statistic);
    return out;
}

OrderSuggestion suggest_orders(std::span<const double> z, int p_max, int q_max) {
    if (p_max < 0 || q_max < 0) {
        throw DomainError("order limits must be non-negative");
    }
    OrderSuggestion out;
    const std::size_t present = count_present(z);
    const int max_lag = std::max(1, std::min<int>(40, static_cast<int>(z.size()) - 2));
    const auto rho = acf(z, max_lag);
    const auto part = pacf(z, max_lag);
    const double band = 2.0 / std::sqrt(static_cast<double>(present));
    for (int k = 1; k <= max_lag; ++k) {
        if (std::abs(rho[static_cast<std::size_t>(k)]) > band) {
            out.acf_cutoff = k;
        }
        if (std::abs(part[static_cast<std::size_t>(k - 1)]) > band) {
            out.pacf_cutoff = k;
        }
    }
    for (int p = 0; p <= p_max; ++p) {
        for (int q = 0; q <= q_max; ++q) {
            const auto start = hannan_rissanen(z, p, q);
            const auto pp = static_cast<std::size_t>(p);
            auto css = [&](std::span<const double> x) {
                std::span<const double> ar = x.subspan(1, pp);
                std::span<const double> ma = x.subspan(1 + pp);
                if (!is_stationary(ar, 0.0) || !is_invertible(ma, 0.0)) {
                    return kInf;
                }
                const auto e = conditional_residuals(x[0], ar, ma, z);
                double sse = 0.0;
                for (double v : e) {
                    if (std::isfinite(v)) {
                        sse += v * v;
                    }
                }
                return sse;
            };
            std::vector<double> x0{start.mu * (1.0 - std::accumulate(start.ar.begin(), start.ar.end(), 0.0))};
            x0.insert(x0.end(), start.ar.begin(), start.ar.end());
            x0.insert(x0.end(), start.ma.begin(), start.ma.end());
            numeric::NelderMeadOptions opts;
            opts.step.assign(x0.size(), 0.05);
            opts.max_evaluations = 1500;
            const auto r = numeric::nelder_mead(css, x0, opts);
            if (!std::isfinite(r.value) || r.value <= 0.0) {
                continue;
            }
            const double n = static_cast<double>(present);
            out.ranked.push_back({p, q, n * std::log(r.value / n) + 2.0 * (p + q + 1)});
        }
    }
    std::sort(out.ranked.begin(), out.ranked.end(),
              [](const OrderCandidate& a, const OrderCandidate& b) { return a.aic < b.aic; });
    return out;
}

} // namespace wavesim::arma
