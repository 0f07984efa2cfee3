#pragma once

#include <cmath>
#include <random>

#include "owl/quaternion.hpp"
#include "owl/vec3.hpp"

namespace owl::test {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3 random_vec(std::mt19937_64& rng, double lo = -10.0, double hi = 10.0) {
    return {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
}

// Random direction, rejection-free via normal deviates.
inline Vec3 random_dir(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec3 v{n(rng), n(rng), n(rng)};
    while (norm(v) < 1e-6) v = {n(rng), n(rng), n(rng)};
    return v / norm(v);
}

inline Quaternion random_quat(std::mt19937_64& rng, double lo = -5.0, double hi = 5.0) {
    return {uniform(rng, lo, hi), random_vec(rng, lo, hi)};
}

inline Quaternion random_unit_quat(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Quaternion q{n(rng), {n(rng), n(rng), n(rng)}};
    while (norm(q) < 1e-6) q = {n(rng), {n(rng), n(rng), n(rng)}};
    return q * (1.0 / norm(q));
}

inline double max_component_diff(const Vec3& a, const Vec3& b) {
    return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

inline double max_component_diff(const Quaternion& a, const Quaternion& b) {
    return std::max(std::abs(a.w - b.w), max_component_diff(a.v, b.v));
}

// atan2 form keeps precision for near-parallel vectors, where acos saturates.
inline double angle_between(const Vec3& a, const Vec3& b) {
    return std::atan2(norm(cross(a, b)), dot(a, b));
}

} // namespace owl::test
