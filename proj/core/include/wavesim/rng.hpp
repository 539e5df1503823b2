#pragma once

#include <cstdint>
#include <string_view>

namespace wavesim {

/// SplitMix64 step; used for seeding and sub-stream derivation.
std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic random source built on xoshiro256**.
///
/// Every variate is produced by code in this library (no std::*_distribution),
/// so a seed reproduces bit-identical output across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Independent sub-stream keyed by name. The child seed is
    /// splitmix64(seed ^ fnv1a64(name)), so adding a new consumer never
    /// perturbs existing streams.
    static Rng stream(std::uint64_t seed, std::string_view name);

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    /// Gamma(shape, 1) by Marsaglia-Tsang.
    double gamma(double shape);

private:
    std::uint64_t s_[4];
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

std::uint64_t fnv1a64(std::string_view text);

} // namespace wavesim
