#pragma once

#include "wavesim/rng.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <string>
#include <vector>

namespace wavesim::seasonal {

inline constexpr double kSigmaFloor = 1e-6;

/// 0.75 (1 - u^2) on [-1, 1], zero outside.
double epanechnikov(double u);

/// Kernel-weighted local mean with half-width bandwidth / 2. NaNs are skipped;
/// hours whose whole window is missing come out NaN. Throws DomainError when
/// bandwidth < 2 and SizeError when the series is not longer than bandwidth.
std::vector<double> smooth_mean(std::span<const double> y, int bandwidth);
/// Kernel-weighted local SD around the smoothed mean, floored at kSigmaFloor.
std::vector<double> smooth_std(std::span<const double> y, std::span<const double> mu, int bandwidth);

std::vector<double> standardize(std::span<const double> y, std::span<const double> mu,
                                std::span<const double> sigma);
std::vector<double> destandardize(std::span<const double> z, std::span<const double> mu,
                                  std::span<const double> sigma);

/// a0 + a1 cos(w t) + a2 sin(w t) + a3 cos(2 w t) + a4 sin(2 w t), w = 2 pi / 8766.
using FourierCoefficients = std::array<double, 5>;

double fourier_eval(const FourierCoefficients& a, double hour_of_year);

struct FourierFit {
    FourierCoefficients coefficients{};
    double r_squared = 0.0;
};

/// Least-squares fit on one model year (8766 values, NaN = missing). Needs at
/// least 100 present values; throws FitError on a rank-deficient design.
FourierFit fit_fourier_year(std::span<const double> segment);

/// Evaluates each year's curve and joins consecutive years with a cubic
/// Hermite blend over [boundary - half_width, boundary + half_width), which
/// keeps level and slope continuous.
std::vector<double> concat_smooth(std::span<const FourierCoefficients> years, int half_width = 72);

/// The four seasonal processes, each carrying five Fourier coefficients.
enum Process { kMuHm0 = 0, kSigmaHm0 = 1, kMuTm02 = 2, kSigmaTm02 = 3 };
inline constexpr int kProcessCount = 4;
inline constexpr int kCoefficientCount = 20;

using CoefficientVector = std::array<double, kCoefficientCount>;

/// Index of coefficient k (0..4) of a process within a CoefficientVector.
constexpr int coefficient_index(int process, int k) { return process * 5 + k; }
/// "mu_hm0.a1" and so on.
std::string coefficient_name(int index);
/// Throws ConfigError for unknown names.
int coefficient_from_name(const std::string& name);

struct Correlation {
    int i = 0;
    int j = 0;
    double rho = 0.0;
};

struct CoefficientModel {
    std::array<double, kCoefficientCount> mean{};
    std::array<double, kCoefficientCount> sd{};
    std::vector<Correlation> correlations;

    Eigen::MatrixXd correlation_matrix() const;
    /// Throws DomainError when a sd is negative, an index is out of range or
    /// the correlation matrix is not positive definite.
    void validate() const;
};

/// Normal margins per coefficient plus correlations for pairs that reject
/// tau-independence at `alpha`. Only matching harmonics of different processes
/// are tested; distinct harmonics are treated as uncorrelated. Correlations
/// are shrunk by 0.95 until the matrix is positive definite. Throws SizeError
/// for fewer than three years.
CoefficientModel fit_coefficient_model(std::span<const CoefficientVector> years, double alpha = 0.05);

std::vector<CoefficientVector> sample_coefficients(const CoefficientModel& model, std::size_t n_years, Rng& rng);

struct SeasonalPair {
    std::vector<double> mu;
    std::vector<double> sigma;
};

enum class Variable { hm0, tm02 };

/// Seasonal mean and SD series for one variable over years.size() model years.
SeasonalPair build_seasonal_series(std::span<const CoefficientVector> years, Variable variable,
                                   int half_width = 72);

} // namespace wavesim::seasonal
