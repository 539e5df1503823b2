#include "wavesim/student_t.hpp"

#include "wavesim/error.hpp"
#include "wavesim/numeric.hpp"

#include <cmath>
#include <numbers>

namespace wavesim::stats {

namespace {

constexpr double kNormalLimitDf = 1e5;

// Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) {
        d = tiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 1000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) {
            break;
        }
    }
    return h;
}

// I_x(a, b) with y = 1 - x supplied separately to avoid cancellation.
double incomplete_beta_xy(double a, double b, double x, double y) {
    if (x <= 0.0) {
        return 0.0;
    }
    if (y <= 0.0) {
        return 1.0;
    }
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                             b * std::log(y);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, y) / b;
}

// Upper tail P(T > q) for q >= 0.
double upper_tail(double q, double df) {
    const double q2 = q * q;
    const double denom = df + q2;
    return 0.5 * incomplete_beta_xy(0.5 * df, 0.5, df / denom, q2 / denom);
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw DomainError("incomplete beta requires positive shape parameters");
    }
    if (x < 0.0 || x > 1.0) {
        throw DomainError("incomplete beta argument outside [0, 1]");
    }
    return incomplete_beta_xy(a, b, x, 1.0 - x);
}

double t_log_pdf(double x, double df) {
    if (df > kNormalLimitDf) {
        return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    return std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
           0.5 * std::log(df * std::numbers::pi) - 0.5 * (df + 1.0) * std::log1p(x * x / df);
}

double t_cdf(double x, double df) {
    if (std::isnan(x)) {
        return x;
    }
    if (df > kNormalLimitDf) {
        return numeric::normal_cdf(x);
    }
    if (std::isinf(x)) {
        return x > 0 ? 1.0 : 0.0;
    }
    const double tail = upper_tail(std::abs(x), df);
    return x > 0.0 ? 1.0 - tail : tail;
}

double t_quantile(double p, double df) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("t quantile probability must lie in (0, 1)");
    }
    if (df > kNormalLimitDf) {
        return numeric::normal_quantile(p);
    }
    const bool lower = p < 0.5;
    const double two_tail = 2.0 * std::min(p, 1.0 - p);
    const double target = 0.5 * two_tail;

    double q = 0.0;
    if (df == 1.0) {
        q = std::tan(std::numbers::pi * (0.5 - target));
        return lower ? -q : q;
    }
    if (df < 1.0) {
        q = numeric::bisect_root([&](double t) { return upper_tail(t, df) - target; }, 0.0, 1e300,
                                 1e-14, 4000);
        return lower ? -q : q;
    }

    // Hill (1970), algorithm 396: initial approximation for the two-tailed quantile.
    const double a = 1.0 / (df - 0.5);
    const double b = 48.0 / (a * a);
    double c = ((20700.0 * a / b - 98.0) * a - 16.0) * a + 96.36;
    const double d = ((94.5 / (b + c) - 3.0) / b + 1.0) * std::sqrt(a * std::numbers::pi / 2.0) * df;
    double y = std::pow(d * two_tail, 2.0 / df);
    if (y > 0.05 + a) {
        const double x = numeric::normal_quantile(0.5 * two_tail);
        y = x * x;
        if (df < 5.0) {
            c += 0.3 * (df - 4.5) * (x + 0.6);
        }
        c = (((0.05 * d * x - 5.0) * x - 7.0) * x - 2.0) * x + b + c;
        y = (((((0.4 * y + 6.3) * y + 36.0) * y + 94.5) / c - y - 3.0) / b + 1.0) * x;
        y = std::expm1(a * y * y);
    } else {
        y = ((1.0 / (((df + 6.0) / (df * y) - 0.089 * d - 0.822) * (df + 2.0) * 3.0) +
              0.5 / (df + 4.0)) *
                 y -
             1.0) *
                (df + 1.0) / (df + 2.0) +
            1.0 / y;
    }
    q = std::sqrt(df * y);
    if (!std::isfinite(q) || q < 0.0) {
        q = std::abs(numeric::normal_quantile(target));
    }

    // Newton refinement of log tail(q) = log target.
    const double log_target = std::log(target);
    for (int it = 0; it < 8; ++it) {
        const double tail = upper_tail(q, df);
        const double density = std::exp(t_log_pdf(q, df));
        if (!(tail > 0.0) || !(density > 0.0)) {
            break;
        }
        double step = (std::log(tail) - log_target) * tail / density;
        double next = q + step;
        if (next < 0.0) {
            next = 0.5 * q;
        }
        const double change = std::abs(next - q);
        q = next;
        if (change <= 1e-15 * std::max(1.0, q)) {
            break;
        }
    }
    return lower ? -q : q;
}

} // namespace wavesim::stats
