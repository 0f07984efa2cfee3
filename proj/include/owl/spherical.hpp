#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "owl/errors.hpp"
#include "owl/vec3.hpp"

namespace owl {

// Bearings closer than this (radians) to a pole are rejected: e_theta is
// undefined on the polar axis.
inline constexpr double kPolarGuard = 1e-9;

// Line-of-sight direction in camera coordinates. theta: azimuth from +x in
// the xy-plane, in (-pi, pi]. phi: elevation from the xy-plane toward +z,
// in [-pi/2, pi/2].
struct SphericalBearing {
    double theta{0.0};
    double phi{0.0};
};

// Right-handed orthonormal triad at a bearing: e_r x e_theta = e_phi.
struct SphericalBasis {
    Vec3 e_r;
    Vec3 e_theta;
    Vec3 e_phi;
};

// Shortest signed angle, wrapped to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * std::numbers::pi);
    if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
    return a;
}

inline bool is_polar(const SphericalBearing& b) {
    return std::abs(b.phi) >= std::numbers::pi / 2.0 - kPolarGuard;
}

inline SphericalBearing bearing_of(const Vec3& v) {
    const double n = norm(v);
    if (n == 0.0) throw ZeroVector("bearing_of: zero vector has no bearing");
    double theta = std::atan2(v.y, v.x);
    if (theta <= -std::numbers::pi) theta = std::numbers::pi;
    const double s = std::clamp(v.z / n, -1.0, 1.0);
    return {theta, std::asin(s)};
}

inline Vec3 vec_from_bearing(const SphericalBearing& b) {
    const double cp = std::cos(b.phi);
    return {cp * std::cos(b.theta), cp * std::sin(b.theta), std::sin(b.phi)};
}

inline SphericalBasis basis_from_bearing(const SphericalBearing& b) {
    if (is_polar(b))
        throw PolarSingularity("basis_from_bearing: e_theta undefined at |phi| = pi/2");
    const double st = std::sin(b.theta), ct = std::cos(b.theta);
    const double sp = std::sin(b.phi), cp = std::cos(b.phi);
    return {{cp * ct, cp * st, sp},
            {-st, ct, 0.0},
            {-sp * ct, -sp * st, cp}};
}

} // namespace owl
