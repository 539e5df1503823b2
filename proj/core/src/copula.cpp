#include "wavesim/copula.hpp"

#include "wavesim/error.hpp"
#include "wavesim/numeric.hpp"
#include "wavesim/stats.hpp"
#include "wavesim/student_t.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>

namespace wavesim::copula {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEdge = 1e-15;

double clamp_unit(double x) { return std::clamp(x, kEdge, 1.0 - kEdge); }

// ---- family kernels at rotation 0 ----------------------------------------

double clayton_log_a(double theta, double u, double v) {
    // log(u^-theta + v^-theta - 1) without overflow
    const double a = -theta * std::log(u);
    const double b = -theta * std::log(v);
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m) - std::exp(-m));
}

struct Bb8Terms {
    double eta, x, y, w;
};

Bb8Terms bb8_terms(double theta, double delta, double u, double v) {
    const double eta = -std::expm1(theta * std::log1p(-delta));
    const double x = -std::expm1(theta * std::log1p(-delta * u));
    const double y = -std::expm1(theta * std::log1p(-delta * v));
    return {eta, x, y, 1.0 - x * y / eta};
}

bool frank_is_flat(double theta) { return std::abs(theta) < 1e-10; }

double base_logpdf(Family f, double p1, double p2, double u, double v) {
    switch (f) {
    case Family::independence:
        return 0.0;
    case Family::gaussian: {
        const double x = numeric::normal_quantile(u);
        const double y = numeric::normal_quantile(v);
        const double r2 = 1.0 - p1 * p1;
        return -0.5 * std::log(r2) - (p1 * p1 * (x * x + y * y) - 2.0 * p1 * x * y) / (2.0 * r2);
    }
    case Family::student_t: {
        const double nu = p2;
        const double x = stats::t_quantile(u, nu);
        const double y = stats::t_quantile(v, nu);
        const double r2 = 1.0 - p1 * p1;
        return std::lgamma(0.5 * (nu + 2.0)) + std::lgamma(0.5 * nu) - 2.0 * std::lgamma(0.5 * (nu + 1.0)) -
               0.5 * std::log(r2) -
               0.5 * (nu + 2.0) * std::log1p((x * x + y * y - 2.0 * p1 * x * y) / (nu * r2)) +
               0.5 * (nu + 1.0) * (std::log1p(x * x / nu) + std::log1p(y * y / nu));
    }
    case Family::clayton:
        return std::log1p(p1) - (1.0 + p1) * (std::log(u) + std::log(v)) -
               (2.0 + 1.0 / p1) * clayton_log_a(p1, u, v);
    case Family::gumbel: {
        const double x = -std::log(u);
        const double y = -std::log(v);
        const double lt = std::log(std::pow(x, p1) + std::pow(y, p1));
        const double a = std::exp(lt / p1);
        return -a - std::log(u) - std::log(v) + (p1 - 1.0) * (std::log(x) + std::log(y)) +
               (1.0 / p1 - 2.0) * lt + std::log(a + p1 - 1.0);
    }
    case Family::frank: {
        if (frank_is_flat(p1)) {
            return 0.0;
        }
        const double a = std::expm1(-p1 * u);
        const double b = std::expm1(-p1 * v);
        const double d = std::expm1(-p1);
        const double den = d + a * b;
        return std::log(-p1 * d) - p1 * (u + v) - 2.0 * std::log(std::abs(den));
    }
    case Family::joe: {
        const double lu = std::log1p(-u);
        const double lv = std::log1p(-v);
        const double su = std::exp(p1 * lu);
        const double sv = std::exp(p1 * lv);
        const double s = su + sv - su * sv;
        return (1.0 / p1 - 2.0) * std::log(s) + (p1 - 1.0) * (lu + lv) + std::log(p1 - 1.0 + s);
    }
    case Family::bb8: {
        const double theta = p1;
        const double delta = p2;
        const auto t = bb8_terms(theta, delta, u, v);
        const double bracket = t.w - (1.0 / theta - 1.0) * (1.0 - t.w);
        return (theta - 1.0) * std::log1p(-delta * v) - std::log(t.eta) + std::log(theta * delta) +
               (theta - 1.0) * std::log1p(-delta * u) + (1.0 / theta - 2.0) * std::log(t.w) + std::log(bracket);
    }
    }
    return 0.0;
}

double base_h(Family f, double p1, double p2, double u, double v) {
    double h = u;
    switch (f) {
    case Family::independence:
        break;
    case Family::gaussian:
        h = numeric::normal_cdf((numeric::normal_quantile(u) - p1 * numeric::normal_quantile(v)) /
                                std::sqrt(1.0 - p1 * p1));
        break;
    case Family::student_t: {
        const double nu = p2;
        const double x = stats::t_quantile(u, nu);
        const double y = stats::t_quantile(v, nu);
        const double scale = std::sqrt((nu + y * y) * (1.0 - p1 * p1) / (nu + 1.0));
        h = stats::t_cdf((x - p1 * y) / scale, nu + 1.0);
        break;
    }
    case Family::clayton:
        h = std::exp(-(p1 + 1.0) * std::log(v) - (1.0 + 1.0 / p1) * clayton_log_a(p1, u, v));
        break;
    case Family::gumbel: {
        const double x = -std::log(u);
        const double y = -std::log(v);
        const double lt = std::log(std::pow(x, p1) + std::pow(y, p1));
        h = std::exp(-std::exp(lt / p1) + (p1 - 1.0) * std::log(y) - std::log(v) + (1.0 / p1 - 1.0) * lt);
        break;
    }
    case Family::frank: {
        if (frank_is_flat(p1)) {
            break;
        }
        const double a = std::expm1(-p1 * u);
        const double b = std::expm1(-p1 * v);
        const double d = std::expm1(-p1);
        h = std::exp(-p1 * v) * a / (d + a * b);
        break;
    }
    case Family::joe: {
        const double su = std::pow(1.0 - u, p1);
        const double sv = std::pow(1.0 - v, p1);
        const double s = su + sv - su * sv;
        h = std::pow(s, 1.0 / p1 - 1.0) * std::pow(1.0 - v, p1 - 1.0) * (1.0 - su);
        break;
    }
    case Family::bb8: {
        const auto t = bb8_terms(p1, p2, u, v);
        h = t.x / t.eta * std::pow(t.w, 1.0 / p1 - 1.0) * std::pow(1.0 - p2 * v, p1 - 1.0);
        break;
    }
    }
    return std::isnan(h) ? h : std::clamp(h, 0.0, 1.0);
}

double base_hinv(Family f, double p1, double p2, double p, double v) {
    switch (f) {
    case Family::independence:
        return p;
    case Family::gaussian:
        return numeric::normal_cdf(numeric::normal_quantile(p) * std::sqrt(1.0 - p1 * p1) +
                                   p1 * numeric::normal_quantile(v));
    case Family::student_t: {
        const double nu = p2;
        const double y = stats::t_quantile(v, nu);
        const double scale = std::sqrt((nu + y * y) * (1.0 - p1 * p1) / (nu + 1.0));
        return stats::t_cdf(stats::t_quantile(p, nu + 1.0) * scale + p1 * y, nu);
    }
    case Family::clayton: {
        const double theta = p1;
        const double b = std::expm1(-theta / (1.0 + theta) * std::log(p));
        const double l = -theta * std::log(v) + std::log(b);
        const double log_base = l > 30.0 ? l + std::log1p(std::exp(-l)) : std::log1p(std::exp(l));
        return std::exp(-log_base / theta);
    }
    case Family::frank: {
        if (frank_is_flat(p1)) {
            return p;
        }
        const double b = std::expm1(-p1 * v);
        const double d = std::expm1(-p1);
        const double a = p * d / (std::exp(-p1 * v) - p * b);
        return -std::log1p(a) / p1;
    }
    case Family::gumbel:
    case Family::joe:
    case Family::bb8:
        break;
    }
    return numeric::bisect_root([&](double u) { return base_h(f, p1, p2, u, v) - p; }, kEdge, 1.0 - kEdge, 1e-14,
                                200);
}

// C(u, v) as the integral of h(u | y) over the latent margin up to its v quantile.
double elliptical_cdf(Family f, double rho, double nu, double u, double v) {
    const bool t = f == Family::student_t;
    const double x = t ? stats::t_quantile(u, nu) : numeric::normal_quantile(u);
    const double yv = t ? stats::t_quantile(v, nu) : numeric::normal_quantile(v);
    const double r = std::sqrt(1.0 - rho * rho);
    auto integrand = [&](double y) {
        if (t) {
            const double scale = std::sqrt((nu + y * y) / (nu + 1.0)) * r;
            return stats::t_cdf((x - rho * y) / scale, nu + 1.0) * std::exp(stats::t_log_pdf(y, nu));
        }
        return numeric::normal_cdf((x - rho * y) / r) * numeric::normal_pdf(y);
    };
    return std::clamp(numeric::integrate(integrand, -std::numeric_limits<double>::infinity(), yv, 1e-12, 12), 0.0,
                      std::min(u, v));
}

double base_cdf(Family f, double p1, double p2, double u, double v) {
    switch (f) {
    case Family::independence:
        return u * v;
    case Family::gaussian:
    case Family::student_t:
        return elliptical_cdf(f, p1, p2, u, v);
    case Family::clayton:
        return std::exp(-clayton_log_a(p1, u, v) / p1);
    case Family::gumbel: {
        const double t = std::pow(-std::log(u), p1) + std::pow(-std::log(v), p1);
        return std::exp(-std::pow(t, 1.0 / p1));
    }
    case Family::frank:
        if (frank_is_flat(p1)) {
            return u * v;
        }
        return -std::log1p(std::expm1(-p1 * u) * std::expm1(-p1 * v) / std::expm1(-p1)) / p1;
    case Family::joe: {
        const double su = std::pow(1.0 - u, p1);
        const double sv = std::pow(1.0 - v, p1);
        return 1.0 - std::pow(su + sv - su * sv, 1.0 / p1);
    }
    case Family::bb8: {
        const auto t = bb8_terms(p1, p2, u, v);
        return (1.0 - std::pow(t.w, 1.0 / p1)) / p2;
    }
    }
    return u * v;
}

CopulaSpec swapped(const CopulaSpec& c) {
    CopulaSpec s = c;
    if (c.rotation == 90) {
        s.rotation = 270;
    } else if (c.rotation == 270) {
        s.rotation = 90;
    }
    return s;
}

// ---- Kendall tau integrals -----------------------------------------------

double frank_tau(double theta) {
    if (frank_is_flat(theta)) {
        return 0.0;
    }
    const double t = std::abs(theta);
    const double debye =
        numeric::integrate([](double s) { return s == 0.0 ? 1.0 : s / std::expm1(s); }, 0.0, t, 1e-13) / t;
    const double tau = 1.0 - 4.0 / t + 4.0 * debye / t;
    return theta < 0.0 ? -tau : tau;
}

double archimedean_tau(const std::function<double(double)>& phi_over_dphi) {
    // depth capped: round-off in phi / phi' near the ends keeps the error estimate from settling
    return 1.0 + 4.0 * numeric::integrate(phi_over_dphi, 0.0, 1.0, 1e-11, 16);
}

} // namespace

// ---- naming / validation ---------------------------------------------------

std::string_view family_name(Family f) {
    switch (f) {
    case Family::independence:
        return "independence";
    case Family::gaussian:
        return "gaussian";
    case Family::student_t:
        return "student_t";
    case Family::clayton:
        return "clayton";
    case Family::gumbel:
        return "gumbel";
    case Family::frank:
        return "frank";
    case Family::joe:
        return "joe";
    case Family::bb8:
        return "bb8";
    }
    return "?";
}

Family family_from_name(std::string_view name) {
    for (Family f : kAllFamilies) {
        if (family_name(f) == name) {
            return f;
        }
    }
    throw ConfigError(fmt::format("unknown copula family '{}'", name));
}

int parameter_count(Family f) {
    switch (f) {
    case Family::independence:
        return 0;
    case Family::student_t:
    case Family::bb8:
        return 2;
    default:
        return 1;
    }
}

void CopulaSpec::validate() const {
    if (rotation != 0 && rotation != 90 && rotation != 180 && rotation != 270) {
        throw DomainError(fmt::format("copula rotation must be 0, 90, 180 or 270, got {}", rotation));
    }
    auto fail = [&](std::string_view what) {
        throw DomainError(fmt::format("{} copula: {}", family_name(family), what));
    };
    if (!std::isfinite(par1) || !std::isfinite(par2)) {
        fail("non-finite parameter");
    }
    switch (family) {
    case Family::independence:
        break;
    case Family::gaussian:
        if (!(std::abs(par1) < 1.0)) fail("|rho| must be < 1");
        break;
    case Family::student_t:
        if (!(std::abs(par1) < 1.0)) fail("|rho| must be < 1");
        if (!(par2 > 2.0)) fail("df must be > 2");
        break;
    case Family::clayton:
        if (!(par1 > 0.0)) fail("theta must be > 0");
        break;
    case Family::gumbel:
    case Family::joe:
        if (!(par1 >= 1.0)) fail("theta must be >= 1");
        break;
    case Family::frank:
        if (par1 == 0.0) fail("theta must be nonzero");
        break;
    case Family::bb8:
        if (!(par1 >= 1.0)) fail("theta must be >= 1");
        if (!(par2 > 0.0 && par2 <= 1.0)) fail("delta must lie in (0, 1]");
        break;
    }
}

std::string CopulaSpec::describe() const {
    std::string out{family_name(family)};
    if (rotation != 0) {
        out += fmt::format("[{}]", rotation);
    }
    switch (parameter_count(family)) {
    case 1:
        out += fmt::format("({:.4g})", par1);
        break;
    case 2:
        out += fmt::format("({:.4g}, {:.4g})", par1, par2);
        break;
    default:
        break;
    }
    return out;
}

// ---- evaluation ------------------------------------------------------------

double copula_logpdf(const CopulaSpec& c, double u, double v) {
    u = clamp_unit(u);
    v = clamp_unit(v);
    switch (c.rotation) {
    case 90:
        return base_logpdf(c.family, c.par1, c.par2, 1.0 - u, v);
    case 180:
        return base_logpdf(c.family, c.par1, c.par2, 1.0 - u, 1.0 - v);
    case 270:
        return base_logpdf(c.family, c.par1, c.par2, u, 1.0 - v);
    default:
        return base_logpdf(c.family, c.par1, c.par2, u, v);
    }
}

double copula_cdf(const CopulaSpec& c, double u, double v) {
    if (u <= 0.0 || v <= 0.0) {
        return 0.0;
    }
    if (u >= 1.0) {
        return std::min(v, 1.0);
    }
    if (v >= 1.0) {
        return u;
    }
    double out = 0.0;
    switch (c.rotation) {
    case 90:
        out = v - base_cdf(c.family, c.par1, c.par2, 1.0 - u, v);
        break;
    case 180:
        out = u + v - 1.0 + base_cdf(c.family, c.par1, c.par2, 1.0 - u, 1.0 - v);
        break;
    case 270:
        out = u - base_cdf(c.family, c.par1, c.par2, u, 1.0 - v);
        break;
    default:
        out = base_cdf(c.family, c.par1, c.par2, u, v);
        break;
    }
    return std::clamp(out, std::max(0.0, u + v - 1.0), std::min(u, v));
}

double h_function(const CopulaSpec& c, double u, double v) {
    u = clamp_unit(u);
    v = clamp_unit(v);
    switch (c.rotation) {
    case 90:
        return 1.0 - base_h(c.family, c.par1, c.par2, 1.0 - u, v);
    case 180:
        return 1.0 - base_h(c.family, c.par1, c.par2, 1.0 - u, 1.0 - v);
    case 270:
        return base_h(c.family, c.par1, c.par2, u, 1.0 - v);
    default:
        return base_h(c.family, c.par1, c.par2, u, v);
    }
}

double h_inverse(const CopulaSpec& c, double p, double v) {
    p = clamp_unit(p);
    v = clamp_unit(v);
    double u = 0.0;
    switch (c.rotation) {
    case 90:
        u = 1.0 - base_hinv(c.family, c.par1, c.par2, 1.0 - p, v);
        break;
    case 180:
        u = 1.0 - base_hinv(c.family, c.par1, c.par2, 1.0 - p, 1.0 - v);
        break;
    case 270:
        u = base_hinv(c.family, c.par1, c.par2, p, 1.0 - v);
        break;
    default:
        u = base_hinv(c.family, c.par1, c.par2, p, v);
        break;
    }
    return clamp_unit(u);
}

double h_function_first(const CopulaSpec& c, double v, double u) { return h_function(swapped(c), v, u); }

double h_inverse_first(const CopulaSpec& c, double p, double u) { return h_inverse(swapped(c), p, u); }

std::vector<Pair> copula_sample(const CopulaSpec& c, std::size_t n, Rng& rng) {
    std::vector<Pair> out(n);
    for (auto& pr : out) {
        pr.v = rng.uniform();
        pr.u = h_inverse(c, rng.uniform(), pr.v);
    }
    return out;
}

double model_tau(const CopulaSpec& c) {
    double tau = 0.0;
    const double theta = c.par1;
    switch (c.family) {
    case Family::independence:
        return 0.0;
    case Family::gaussian:
    case Family::student_t:
        tau = 2.0 / std::numbers::pi * std::asin(c.par1);
        break;
    case Family::clayton:
        tau = theta / (theta + 2.0);
        break;
    case Family::gumbel:
        tau = 1.0 - 1.0 / theta;
        break;
    case Family::frank:
        tau = frank_tau(theta);
        break;
    case Family::joe:
        if (theta == 1.0) {
            return 0.0;
        }
        tau = archimedean_tau([theta](double t) {
            const double s = std::pow(1.0 - t, theta);
            const double one_minus_s = -std::expm1(theta * std::log1p(-t));
            if (s <= 0.0 || one_minus_s <= 0.0) {
                return 0.0;
            }
            return std::log(one_minus_s) * one_minus_s / (theta * std::pow(1.0 - t, theta - 1.0));
        });
        break;
    case Family::bb8: {
        const double delta = c.par2;
        if (theta == 1.0) {
            return 0.0;
        }
        const double eta = -std::expm1(theta * std::log1p(-delta));
        tau = archimedean_tau([theta, delta, eta](double t) {
            const double base = 1.0 - delta * t;
            const double x = -std::expm1(theta * std::log1p(-delta * t));
            if (x <= 0.0 || base <= 0.0) {
                return 0.0;
            }
            return std::log(x / eta) * x / (theta * delta * std::pow(base, theta - 1.0));
        });
        break;
    }
    }
    return (c.rotation == 90 || c.rotation == 270) ? -tau : tau;
}

// ---- fitting ---------------------------------------------------------------

namespace {

struct Sample {
    std::span<const double> u;
    std::span<const double> v;
};

double log_likelihood(const CopulaSpec& c, const Sample& s) {
    double ll = 0.0;
    for (std::size_t i = 0; i < s.u.size(); ++i) {
        ll += copula_logpdf(c, s.u[i], s.v[i]);
    }
    return std::isfinite(ll) ? ll : -kInf;
}

struct Bounds {
    double lo, hi;
};

Bounds one_parameter_bounds(Family f) {
    switch (f) {
    case Family::gaussian:
        return {-0.999, 0.999};
    case Family::clayton:
        return {1e-4, 28.0};
    case Family::gumbel:
        return {1.0, 17.0};
    case Family::frank:
        return {-35.0, 35.0};
    case Family::joe:
        return {1.0, 30.0};
    default:
        return {0.0, 0.0};
    }
}

constexpr double kTDfLo = 2.001;
constexpr double kTDfHi = 60.0;
constexpr double kBb8ThetaHi = 8.0;
constexpr double kBb8DeltaLo = 1e-4;

// Profile likelihood: the t quantiles depend on df only, so each df costs one
// pass of quantiles and the inner search over rho reuses them.
CopulaSpec fit_student_t(const Sample& s, int rotation) {
    const std::size_t n = s.u.size();
    std::vector<double> ur(n);
    std::vector<double> vr(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = clamp_unit(s.u[i]);
        const double v = clamp_unit(s.v[i]);
        ur[i] = (rotation == 90 || rotation == 180) ? 1.0 - u : u;
        vr[i] = (rotation == 180 || rotation == 270) ? 1.0 - v : v;
    }
    std::vector<double> sq(n);
    std::vector<double> cross(n);
    double marginal = 0.0;
    auto prepare = [&](double df) {
        marginal = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = stats::t_quantile(ur[i], df);
            const double y = stats::t_quantile(vr[i], df);
            sq[i] = x * x + y * y;
            cross[i] = x * y;
            marginal += std::log1p(x * x / df) + std::log1p(y * y / df);
        }
    };
    auto loglik = [&](double rho, double df) {
        const double r2 = 1.0 - rho * rho;
        double quad = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            quad += std::log1p((sq[i] - 2.0 * rho * cross[i]) / (df * r2));
        }
        const double norm = std::lgamma(0.5 * (df + 2.0)) + std::lgamma(0.5 * df) - 2.0 * std::lgamma(0.5 * (df + 1.0)) -
                            0.5 * std::log(r2);
        return static_cast<double>(n) * norm - 0.5 * (df + 2.0) * quad + 0.5 * (df + 1.0) * marginal;
    };
    double best_rho = 0.0;
    auto profile = [&](double log_df) {
        const double df = kTDfLo + std::exp(log_df);
        prepare(df);
        const auto inner = numeric::brent_minimize([&](double r) { return -loglik(r, df); }, -0.999, 0.999, 1e-9, 200);
        best_rho = inner.x;
        return inner.value;
    };
    const auto outer = numeric::brent_minimize(profile, std::log(1e-3), std::log(kTDfHi - kTDfLo), 1e-7, 200);
    const double df = kTDfLo + std::exp(outer.x);
    profile(outer.x);
    if (!std::isfinite(outer.value)) {
        throw FitError("student_t copula likelihood is not finite");
    }
    return {Family::student_t, rotation, best_rho, df};
}

CopulaSpec fit_bb8(const Sample& s, int rotation) {
    // sin^2 box map: the bounds sit at finite coordinates, so a fit pinned at theta_hi converges quickly
    auto box = [](double x) { return std::sin(x) * std::sin(x); };
    auto unbox = [](double f) { return std::asin(std::sqrt(f)); };
    auto decode = [&](std::span<const double> x) {
        return std::pair{1.0 + (kBb8ThetaHi - 1.0) * box(x[0]), kBb8DeltaLo + (1.0 - kBb8DeltaLo) * box(x[1])};
    };
    auto nll = [&](std::span<const double> x) {
        const auto [theta, delta] = decode(x);
        return -log_likelihood(CopulaSpec{Family::bb8, rotation, theta, delta}, s);
    };
    std::vector<double> start;
    double best_start = kInf;
    for (double theta : {1.3, 2.0, 3.5, 6.0}) {
        for (double delta : {0.2, 0.5, 0.8, 0.97}) {
            std::vector<double> x{unbox((theta - 1.0) / (kBb8ThetaHi - 1.0)),
                                  unbox((delta - kBb8DeltaLo) / (1.0 - kBb8DeltaLo))};
            const double val = nll(x);
            if (val < best_start) {
                best_start = val;
                start = x;
            }
        }
    }
    if (start.empty()) {
        throw FitError("bb8 copula likelihood is not finite at any start");
    }
    numeric::NelderMeadOptions opts;
    opts.step = {0.3, 0.3};
    opts.max_evaluations = 800;
    opts.f_tolerance = 1e-9;
    opts.x_tolerance = 1e-4;
    const auto best = numeric::nelder_mead_restarted(nll, start, opts, 2);
    if (!std::isfinite(best.value)) {
        throw FitError("bb8 copula likelihood is not finite");
    }
    const auto [theta, delta] = decode(best.x);
    return {Family::bb8, rotation, theta, delta};
}

} // namespace

CopulaFit fit_copula(std::span<const double> u, std::span<const double> v, Family family, int rotation) {
    if (u.size() != v.size()) {
        throw SizeError("copula fit: u and v differ in length");
    }
    if (u.size() < 30) {
        throw SizeError(fmt::format("copula fit needs at least 30 pairs, got {}", u.size()));
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] > 0.0 && u[i] < 1.0 && v[i] > 0.0 && v[i] < 1.0)) {
            throw DomainError("copula fit: observations must lie strictly inside (0, 1)");
        }
    }
    const Sample s{u, v};
    CopulaFit fit;
    switch (family) {
    case Family::independence:
        fit.spec = {Family::independence, 0, 0.0, 0.0};
        break;
    case Family::student_t:
        fit.spec = fit_student_t(s, rotation);
        break;
    case Family::bb8:
        fit.spec = fit_bb8(s, rotation);
        break;
    default: {
        const auto [lo, hi] = one_parameter_bounds(family);
        auto nll = [&](double p) {
            return -log_likelihood(CopulaSpec{family, rotation, p, 0.0}, s);
        };
        auto m = numeric::brent_minimize(nll, lo, hi, 1e-8, 200);
        if (!std::isfinite(m.value)) {
            throw FitError(fmt::format("{} copula likelihood is not finite", family_name(family)));
        }
        if (family == Family::frank && frank_is_flat(m.x)) {
            m.x = 1e-8;
        }
        fit.spec = {family, rotation, m.x, 0.0};
        break;
    }
    }
    fit.log_likelihood = log_likelihood(fit.spec, s);
    if (!std::isfinite(fit.log_likelihood)) {
        throw FitError(fmt::format("{} copula fit produced a non-finite likelihood", family_name(family)));
    }
    fit.aic = 2.0 * parameter_count(family) - 2.0 * fit.log_likelihood;
    return fit;
}

Selection select_copula(std::span<const double> u, std::span<const double> v, std::span<const Family> candidates) {
    if (candidates.empty()) {
        throw ConfigError("copula selection needs at least one candidate family");
    }
    const double tau = stats::kendall_tau(u, v);
    Selection sel;
    std::string last_error;
    for (Family f : candidates) {
        std::vector<int> rotations{0};
        if (f == Family::clayton || f == Family::gumbel || f == Family::joe || f == Family::bb8) {
            rotations = tau >= 0.0 ? std::vector<int>{0, 180} : std::vector<int>{90, 270};
        }
        for (int rot : rotations) {
            try {
                sel.table.push_back(fit_copula(u, v, f, rot));
            } catch (const FitError& e) {
                last_error = e.what();
            }
        }
    }
    if (sel.table.empty()) {
        throw FitError("every candidate copula failed to fit: " + last_error);
    }
    sel.best = *std::min_element(sel.table.begin(), sel.table.end(),
                                 [](const CopulaFit& a, const CopulaFit& b) { return a.aic < b.aic; });
    return sel;
}

} // namespace wavesim::copula
