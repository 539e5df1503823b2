#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace wavesim::arma {

/// Z_t = c + sum_j ar[j] Z_{t-1-j} + e_t + sum_j ma[j] e_{t-1-j}, Var(e) = sigma2.
struct ArmaModel {
    std::vector<double> ar;
    std::vector<double> ma;
    double intercept = 0.0;
    double sigma2 = 1.0;
    double log_likelihood = 0.0;
    /// Standard errors in the order (intercept, ar..., ma...); empty if unknown.
    std::vector<double> standard_errors;

    int p() const { return static_cast<int>(ar.size()); }
    int q() const { return static_cast<int>(ma.size()); }
    /// c / (1 - sum ar).
    double mean() const;
    /// Throws DomainError unless the AR part is stationary and the MA part
    /// invertible (root moduli above 1 + 1e-6) and sigma2 > 0.
    void validate() const;
};

/// Roots of 1 - ar[0] z - ... - ar[p-1] z^p.
std::vector<std::complex<double>> ar_roots(std::span<const double> ar);
/// Roots of 1 + ma[0] z + ... + ma[q-1] z^q.
std::vector<std::complex<double>> ma_roots(std::span<const double> ma);
bool is_stationary(std::span<const double> ar, double tolerance = 1e-6);
bool is_invertible(std::span<const double> ma, double tolerance = 1e-6);

/// Sample autocorrelations at lags 0..max_lag. NaNs are skipped pairwise.
/// Throws SizeError when the series is not longer than max_lag + 1 and
/// DomainError for a constant series.
std::vector<double> acf(std::span<const double> x, int max_lag);
/// Partial autocorrelations at lags 1..max_lag (Durbin-Levinson).
std::vector<double> pacf(std::span<const double> x, int max_lag);

/// Exact Gaussian maximum likelihood via the Kalman filter; NaN entries are
/// treated as missing. Needs 50 (p + q + 1) present values. Throws FitError
/// when the optimizer does not reach a stationary, invertible optimum.
ArmaModel fit_arma(std::span<const double> z, int p, int q);

/// Exact Gaussian log-likelihood of z under the model (NaN = missing).
double log_likelihood(const ArmaModel& model, std::span<const double> z);

/// Conditional innovations with zero pre-sample values. A missing z_t yields a
/// NaN residual and is replaced by its one-step prediction afterwards.
std::vector<double> residuals(const ArmaModel& model, std::span<const double> z);

/// Runs the recursion from zero initial values over all innovations and drops
/// the first burn_in outputs. Returns innovations.size() - burn_in values.
std::vector<double> simulate_arma(const ArmaModel& model, std::span<const double> innovations,
                                  std::size_t burn_in = 1000);

struct LjungBox {
    double statistic = 0.0;
    double p_value = 1.0;
    int lags = 0;
    int degrees_of_freedom = 0;
};

/// Portmanteau test on residuals; fitted_parameters reduces the degrees of freedom.
LjungBox ljung_box(std::span<const double> residuals, int lags, int fitted_parameters = 0);

struct OrderCandidate {
    int p = 0;
    int q = 0;
    double aic = 0.0;
};

struct OrderSuggestion {
    /// Ascending AIC.
    std::vector<OrderCandidate> ranked;
    /// Last lag with |acf| (resp. |pacf|) above 2 / sqrt(n); 0 if none.
    int acf_cutoff = 0;
    int pacf_cutoff = 0;
};

/// Ranks all orders up to (p_max, q_max) by the AIC of conditional-sum-of-squares fits.
OrderSuggestion suggest_orders(std::span<const double> z, int p_max, int q_max);

} // namespace wavesim::arma
