#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace wavesim::numeric {

using Objective = std::function<double(std::span<const double>)>;

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

struct NelderMeadOptions {
    /// Initial simplex edge per coordinate; broadcast when size 1.
    std::vector<double> step{0.1};
    double f_tolerance = 1e-10;
    double x_tolerance = 1e-9;
    int max_evaluations = 4000;
};

/// Derivative-free simplex minimization. Non-finite objective values are
/// treated as +infinity, so constraints can be expressed by returning NaN/inf.
MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0,
                           const NelderMeadOptions& options = {});

/// Nelder-Mead restarted from its own optimum until the value stops improving.
MinimizeResult nelder_mead_restarted(const Objective& f, std::vector<double> x0,
                                     const NelderMeadOptions& options = {}, int max_restarts = 4);

struct ScalarMinimum {
    double x = 0.0;
    double value = 0.0;
    int evaluations = 0;
};

/// Brent's method on [lo, hi].
ScalarMinimum brent_minimize(const std::function<double(double)>& f, double lo, double hi,
                             double tolerance = 1e-10, int max_iterations = 200);

/// Root of a monotone function on [lo, hi] by bisection. f(lo) and f(hi)
/// must bracket zero; otherwise the nearer endpoint is returned.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tolerance = 1e-12, int max_iterations = 200);

/// Adaptive 21-point Gauss-Kronrod quadrature.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tolerance = 1e-10, int max_depth = 40);

struct LeastSquaresOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-14;
    double step_tolerance = 1e-12;
    double initial_lambda = 1e-3;
};

struct LeastSquaresResult {
    Eigen::VectorXd x;
    double sum_of_squares = 0.0;
    int iterations = 0;
    bool converged = false;
};

using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Box-constrained Levenberg-Marquardt with a forward-difference Jacobian.
/// Steps are projected onto [lower, upper].
LeastSquaresResult levenberg_marquardt(const ResidualFunction& residuals, Eigen::VectorXd x0,
                                       const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                       const LeastSquaresOptions& options = {});

double normal_pdf(double x);
double normal_cdf(double x);
/// Inverse standard normal CDF; p must lie in (0, 1).
double normal_quantile(double p);

/// Central-difference Hessian of f at x.
Eigen::MatrixXd numerical_hessian(const Objective& f, std::span<const double> x,
                                  std::span<const double> steps);

} // namespace wavesim::numeric
