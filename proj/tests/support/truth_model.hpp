#pragma once

// Reference model assembled from fixed parameter values, used to
// generate synthetic "observations" with known structure.

#include <wavesim/pipeline.hpp>

#include <cstdint>

namespace wavesim::testing {

inline constexpr double kSteepA = 0.0782;
inline constexpr double kSteepB = 9.994;
inline constexpr double kSteepC = 0.07674;

arma::ArmaModel hm0_arma_truth();
arma::ArmaModel tm02_arma_truth();

seasonal::CoefficientModel coefficient_truth();
residuals::ResidualModel residual_truth();

/// Seasonal duration margins are discretized log-normals (seeded), joined by
/// the reference renewal copulas.
renewal::RenewalModel renewal_truth(std::uint64_t seed = 7);

pipeline::FittedModel truth_model(std::uint64_t seed = 7);

/// `years` of simulated record from the truth model, labelled like an
/// observation series.
ingest::HourlySeries synthetic_record(std::size_t years, std::uint64_t seed);

} // namespace wavesim::testing
