#pragma once

#include "wavesim/rng.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wavesim::copula {

enum class Family { independence, gaussian, student_t, clayton, gumbel, frank, joe, bb8 };

inline constexpr std::array<Family, 8> kAllFamilies{Family::independence, Family::gaussian, Family::student_t,
                                                    Family::clayton,      Family::gumbel,   Family::frank,
                                                    Family::joe,          Family::bb8};

std::string_view family_name(Family f);
/// Throws ConfigError for unknown names.
Family family_from_name(std::string_view name);
int parameter_count(Family f);

/// A bivariate copula: family, rotation in degrees (0, 90, 180, 270) and up
/// to two parameters.
///
/// Parameters: gaussian rho; student_t (rho, df); clayton theta > 0;
/// gumbel theta >= 1; frank theta != 0; joe theta >= 1; bb8 (theta >= 1,
/// delta in (0, 1]). Rotations follow the usual reflections:
/// C90(u, v) = v - C(1 - u, v), C180(u, v) = u + v - 1 + C(1 - u, 1 - v),
/// C270(u, v) = u - C(u, 1 - v).
struct CopulaSpec {
    Family family = Family::independence;
    int rotation = 0;
    double par1 = 0.0;
    double par2 = 0.0;

    /// Throws DomainError when parameters or rotation are inadmissible.
    void validate() const;
    std::string describe() const;
};

double copula_logpdf(const CopulaSpec& c, double u, double v);
double copula_cdf(const CopulaSpec& c, double u, double v);

/// h(u | v) = dC(u, v) / dv.
double h_function(const CopulaSpec& c, double u, double v);
/// Solves h(u | v) = p for u.
double h_inverse(const CopulaSpec& c, double p, double v);

/// dC(u, v) / du, the law of V given U = u.
double h_function_first(const CopulaSpec& c, double v, double u);
/// Solves h_function_first(v | u) = p for v.
double h_inverse_first(const CopulaSpec& c, double p, double u);

struct Pair {
    double u;
    double v;
};

/// Draws by conditional inversion: v uniform, u = h_inverse(w | v).
std::vector<Pair> copula_sample(const CopulaSpec& c, std::size_t n, Rng& rng);

/// Kendall's tau implied by the copula.
double model_tau(const CopulaSpec& c);

struct CopulaFit {
    CopulaSpec spec;
    double log_likelihood = 0.0;
    double aic = 0.0;
};

/// Maximum-likelihood fit for one family and rotation. Needs >= 30 pairs
/// strictly inside the unit square; throws SizeError/DomainError otherwise and
/// FitError when the optimizer fails.
CopulaFit fit_copula(std::span<const double> u, std::span<const double> v, Family family, int rotation = 0);

struct Selection {
    CopulaFit best;
    /// Every candidate that could be fitted.
    std::vector<CopulaFit> table;
};

/// Fits every candidate family over the rotations compatible with the sign
/// of the empirical tau and returns the minimum-AIC fit.
Selection select_copula(std::span<const double> u, std::span<const double> v, std::span<const Family> candidates);

} // namespace wavesim::copula
