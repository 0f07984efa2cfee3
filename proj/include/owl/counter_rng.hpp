#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace owl {

// Counter-based random draws: every value is a pure function of its key, so
// noise is reproducible and independent of evaluation order or parallelism.

namespace detail {

// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t frame,
                                  std::uint64_t point_id, std::uint64_t stream) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ frame);
    h = mix64(h ^ point_id);
    h = mix64(h ^ stream);
    return h;
}

} // namespace detail

// Uniform draw in the open interval (0, 1).
inline double counter_uniform(std::uint64_t seed, std::uint64_t frame,
                              std::uint64_t point_id, std::uint64_t stream) {
    const std::uint64_t h = detail::counter_hash(seed, frame, point_id, stream);
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal draw via Box-Muller on streams (2s, 2s+1).
inline double counter_gaussian(std::uint64_t seed, std::uint64_t frame,
                               std::uint64_t point_id, std::uint64_t stream) {
    const double u1 = counter_uniform(seed, frame, point_id, 2 * stream);
    const double u2 = counter_uniform(seed, frame, point_id, 2 * stream + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace owl
