#pragma once

namespace wavesim::stats {

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Student t with real-valued degrees of freedom `df` > 0.
double t_log_pdf(double x, double df);
double t_cdf(double x, double df);
/// Inverse of t_cdf; p in (0, 1). Hill's approximation refined by Newton steps.
double t_quantile(double p, double df);

} // namespace wavesim::stats
