#include "wavesim/numeric.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace wavesim::numeric {

namespace {

double safe_eval(const Objective& f, std::span<const double> x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

} // namespace

MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0,
                           const NelderMeadOptions& options) {
    const std::size_t n = x0.size();
    MinimizeResult result;
    if (n == 0) {
        result.value = safe_eval(f, x0);
        result.evaluations = 1;
        result.converged = true;
        return result;
    }

    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double step = options.step.size() == n ? options.step[i] : options.step.front();
        simplex[i + 1][i] += step;
    }
    int evals = 0;
    for (std::size_t i = 0; i <= n; ++i) {
        values[i] = safe_eval(f, simplex[i]);
        ++evals;
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n);
    std::vector<double> trial(n);
    std::vector<double> trial2(n);

    bool converged = false;
    while (evals < options.max_evaluations) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[n - 1];

        double x_spread = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                x_spread = std::max(x_spread, std::abs(simplex[i][j] - simplex[best][j]));
            }
        }
        const double f_spread = std::abs(values[worst] - values[best]);
        if (std::isfinite(values[worst]) && f_spread <= options.f_tolerance * (1.0 + std::abs(values[best])) &&
            x_spread <= options.x_tolerance * (1.0 + std::abs(simplex[best][0]))) {
            converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                centroid[j] += simplex[i][j] / static_cast<double>(n);
            }
        }

        for (std::size_t j = 0; j < n; ++j) {
            trial[j] = centroid[j] + (centroid[j] - simplex[worst][j]);
        }
        const double f_reflect = safe_eval(f, trial);
        ++evals;

        if (f_reflect < values[best]) {
            for (std::size_t j = 0; j < n; ++j) {
                trial2[j] = centroid[j] + 2.0 * (centroid[j] - simplex[worst][j]);
            }
            const double f_expand = safe_eval(f, trial2);
            ++evals;
            if (f_expand < f_reflect) {
                simplex[worst] = trial2;
                values[worst] = f_expand;
            } else {
                simplex[worst] = trial;
                values[worst] = f_reflect;
            }
            continue;
        }
        if (f_reflect < values[second_worst]) {
            simplex[worst] = trial;
            values[worst] = f_reflect;
            continue;
        }

        const bool outside = f_reflect < values[worst];
        for (std::size_t j = 0; j < n; ++j) {
            trial2[j] = outside ? centroid[j] + 0.5 * (trial[j] - centroid[j])
                                : centroid[j] + 0.5 * (simplex[worst][j] - centroid[j]);
        }
        const double f_contract = safe_eval(f, trial2);
        ++evals;
        if (f_contract < std::min(f_reflect, values[worst])) {
            simplex[worst] = trial2;
            values[worst] = f_contract;
            continue;
        }

        // shrink towards the best vertex
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
            }
            values[i] = safe_eval(f, simplex[i]);
            ++evals;
        }
    }

    const auto best_it = std::min_element(values.begin(), values.end());
    const auto best_index = static_cast<std::size_t>(best_it - values.begin());
    result.x = simplex[best_index];
    result.value = *best_it;
    result.evaluations = evals;
    result.converged = converged;
    return result;
}

MinimizeResult nelder_mead_restarted(const Objective& f, std::vector<double> x0,
                                     const NelderMeadOptions& options, int max_restarts) {
    MinimizeResult best = nelder_mead(f, std::move(x0), options);
    int total = best.evaluations;
    for (int r = 0; r < max_restarts; ++r) {
        MinimizeResult next = nelder_mead(f, best.x, options);
        total += next.evaluations;
        const bool improved = next.value < best.value - options.f_tolerance * (1.0 + std::abs(best.value));
        if (next.value <= best.value) {
            best = std::move(next);
        }
        if (!improved) {
            break;
        }
    }
    best.evaluations = total;
    return best;
}

ScalarMinimum brent_minimize(const std::function<double(double)>& f, double lo, double hi,
                             double tolerance, int max_iterations) {
    const int bits = std::clamp(static_cast<int>(-std::log2(tolerance)), 8, 52);
    std::uintmax_t iterations = static_cast<std::uintmax_t>(max_iterations);
    auto guarded = [&](double x) {
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };
    const auto [x, value] = boost::math::tools::brent_find_minima(guarded, lo, hi, bits, iterations);
    return {x, value, static_cast<int>(iterations)};
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tolerance,
                   int max_iterations) {
    double f_lo = f(lo);
    const double f_hi = f(hi);
    if (f_lo == 0.0) {
        return lo;
    }
    if (f_hi == 0.0) {
        return hi;
    }
    if ((f_lo > 0.0) == (f_hi > 0.0)) {
        return std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
    }
    for (int i = 0; i < max_iterations && hi - lo > tolerance; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f(mid);
        if (f_mid == 0.0) {
            return mid;
        }
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tolerance,
                 int max_depth) {
    if (a == b) {
        return 0.0;
    }
    return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
        f, a, b, static_cast<unsigned>(max_depth), tolerance);
}

LeastSquaresResult levenberg_marquardt(const ResidualFunction& residuals, Eigen::VectorXd x0,
                                       const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                       const LeastSquaresOptions& options) {
    const Eigen::Index n = x0.size();
    auto project = [&](Eigen::VectorXd x) {
        return x.cwiseMax(lower).cwiseMin(upper).eval();
    };
    auto jacobian = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& r0) {
        Eigen::MatrixXd J(r0.size(), n);
        for (Eigen::Index j = 0; j < n; ++j) {
            double h = 1e-7 * std::max(1.0, std::abs(x[j]));
            Eigen::VectorXd xh = x;
            // step inward when sitting on the upper bound
            if (xh[j] + h > upper[j]) {
                h = -h;
            }
            xh[j] += h;
            J.col(j) = (residuals(xh) - r0) / h;
        }
        return J;
    };

    LeastSquaresResult out;
    Eigen::VectorXd x = project(std::move(x0));
    Eigen::VectorXd r = residuals(x);
    double cost = r.squaredNorm();
    double lambda = options.initial_lambda;

    for (int it = 0; it < options.max_iterations; ++it) {
        out.iterations = it + 1;
        const Eigen::MatrixXd J = jacobian(x, r);
        const Eigen::VectorXd g = J.transpose() * r;
        // projected gradient: ignore components pushing against an active bound
        Eigen::VectorXd pg = g;
        for (Eigen::Index j = 0; j < n; ++j) {
            if ((x[j] <= lower[j] && g[j] > 0.0) || (x[j] >= upper[j] && g[j] < 0.0)) {
                pg[j] = 0.0;
            }
        }
        if (pg.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
            out.converged = true;
            break;
        }
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        bool accepted = false;
        for (int attempt = 0; attempt < 30; ++attempt) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-12);
            const Eigen::VectorXd step = A.ldlt().solve(-g);
            const Eigen::VectorXd candidate = project(x + step);
            const Eigen::VectorXd r_candidate = residuals(candidate);
            const double c = r_candidate.allFinite() ? r_candidate.squaredNorm()
                                                     : std::numeric_limits<double>::infinity();
            if (c < cost) {
                const double moved = (candidate - x).norm();
                x = candidate;
                r = r_candidate;
                const double old_cost = cost;
                cost = c;
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                if (moved < options.step_tolerance * (1.0 + x.norm()) ||
                    old_cost - cost < 1e-15 * old_cost) {
                    out.converged = true;
                }
                break;
            }
            lambda *= 4.0;
        }
        if (!accepted) {
            // no descent possible at any damping: stationary within precision
            out.converged = true;
            break;
        }
        if (out.converged) {
            break;
        }
    }
    out.x = x;
    out.sum_of_squares = cost;
    return out;
}

double normal_pdf(double x) {
    constexpr double inv_sqrt_2pi = 0.39894228040143267794;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

Eigen::MatrixXd numerical_hessian(const Objective& f, std::span<const double> x,
                                  std::span<const double> steps) {
    const std::size_t n = x.size();
    Eigen::MatrixXd H(n, n);
    std::vector<double> p(x.begin(), x.end());
    const double f0 = f(p);
    for (std::size_t i = 0; i < n; ++i) {
        const double hi = steps[i];
        p[i] = x[i] + hi;
        const double fp = f(p);
        p[i] = x[i] - hi;
        const double fm = f(p);
        p[i] = x[i];
        H(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
        for (std::size_t j = 0; j < i; ++j) {
            const double hj = steps[j];
            double acc = 0.0;
            for (int si : {1, -1}) {
                for (int sj : {1, -1}) {
                    p[i] = x[i] + si * hi;
                    p[j] = x[j] + sj * hj;
                    acc += si * sj * f(p);
                }
            }
            p[i] = x[i];
            p[j] = x[j];
            H(i, j) = H(j, i) = acc / (4.0 * hi * hj);
        }
    }
    return H;
}

} // namespace wavesim::numeric
