#pragma once

#include <cmath>
#include <string>

#include "owl/errors.hpp"
#include "owl/quaternion.hpp"
#include "owl/spherical.hpp"
#include "owl/track.hpp"
#include "owl/vec3.hpp"

namespace owl {

// Ranges at or below this (meters) put the point on top of the camera; the
// cues diverge there.
inline constexpr double kRangeEpsilon = 1e-9;

// Tolerance for the planarity checks of the 2D scalar projection.
inline constexpr double kPlanarTolerance = 1e-9;

// Camera pose and motion at one instant. velocity_t is the camera's
// translational velocity expressed in the camera frame; omega_cam is the
// camera's angular rate in the camera (body) frame.
struct CameraState {
    Vec3 position;
    Quaternion orientation;
    Vec3 velocity_t;
    Vec3 omega_cam;
};

// Perceived cues of one point at one instant: looming [1/s] and perceived
// rotation [rad/s]. omega is orthogonal to the line of sight by construction.
struct CueSample {
    int point_id{0};
    double time{0.0};
    double looming{0.0};
    Vec3 omega;
    Vec3 e_r;
    SphericalBearing bearing;
};

// Angular and radial rates of the motion field decomposed at a bearing.
struct FlowRates {
    double r_dot_over_r{0.0};   // [1/s]
    double theta_dot{0.0};      // [rad/s]
    double phi_dot{0.0};        // [rad/s]
};

// (looming, omega) pair before it is attached to a point identity.
struct Cues {
    double looming{0.0};
    Vec3 omega;
};

// Velocity of a scene point relative to the camera, camera frame:
// V_F = -t - Omega x r.
inline Vec3 motion_field(const Vec3& t, const Vec3& omega_cam, const Vec3& r) {
    return -t - cross(omega_cam, r);
}

// Closed-form cues from the relative translation t and range vector r:
// looming = t.e_r / |r| (positive while the range shrinks) and
// omega = -(t x e_r) / |r|.
inline Cues cues_oracle(const Vec3& t, const Vec3& r) {
    const double range = norm(r);
    if (range <= kRangeEpsilon)
        throw RangeTooSmall("cues_oracle: |r| <= " + std::to_string(kRangeEpsilon));
    const Vec3 e_r = r / range;
    return {dot(t, e_r) / range, cross(t, e_r) * (-1.0 / range)};
}

// Decomposes a motion-field velocity into radial/angular rates at the
// bearing of r.
inline FlowRates flow_rates(const Vec3& r, const Vec3& field_velocity) {
    const double range = norm(r);
    if (range <= kRangeEpsilon)
        throw RangeTooSmall("flow_rates: |r| <= " + std::to_string(kRangeEpsilon));
    const SphericalBearing b = bearing_of(r);
    const SphericalBasis basis = basis_from_bearing(b);
    return {dot(field_velocity, basis.e_r) / range,
            dot(field_velocity, basis.e_theta) / (range * std::cos(b.phi)),
            dot(field_velocity, basis.e_phi) / range};
}

// Removes the camera's own rotation from measured angular rates, leaving the
// translation-induced perceived rotation:
//   omega_phi   = -theta_dot cos(phi) - Omega_phi
//   omega_theta =  phi_dot            - Omega_theta
// The returned vector has no radial component by construction.
inline Vec3 derotate(const FlowRates& rates, const SphericalBearing& bearing,
                     const Vec3& omega_cam) {
    const SphericalBasis basis = basis_from_bearing(bearing);
    const double omega_phi =
        -rates.theta_dot * std::cos(bearing.phi) - dot(omega_cam, basis.e_phi);
    const double omega_theta = rates.phi_dot - dot(omega_cam, basis.e_theta);
    return basis.e_theta * omega_theta + basis.e_phi * omega_phi;
}

// Second-order cues from sampled geometry: central differences of log-range
// and bearing at sample k, de-rotated with the camera rate omega_cam at k.
// Azimuth differences are unwrapped to the shortest signed angle.
inline Cues cues_from_track(const Track& track, std::size_t k, double dt,
                            const Vec3& omega_cam) {
    if (k == 0 || k + 1 >= track.rel_positions.size())
        throw IndexOutOfRange("cues_from_track: sample " + std::to_string(k) +
                              " lacks a neighbour on each side");
    const Vec3& prev = track.rel_positions[k - 1];
    const Vec3& cur = track.rel_positions[k];
    const Vec3& next = track.rel_positions[k + 1];
    const double range_prev = norm(prev);
    const double range_next = norm(next);
    if (range_prev <= kRangeEpsilon || norm(cur) <= kRangeEpsilon ||
        range_next <= kRangeEpsilon)
        throw RangeTooSmall("cues_from_track: track touches the camera near sample " +
                            std::to_string(k));
    const SphericalBearing b_prev = bearing_of(prev);
    const SphericalBearing b_cur = bearing_of(cur);
    const SphericalBearing b_next = bearing_of(next);
    if (is_polar(b_prev) || is_polar(b_cur) || is_polar(b_next))
        throw PolarSingularity("cues_from_track: track crosses the polar axis near sample " +
                               std::to_string(k));
    const double looming = -(std::log(range_next) - std::log(range_prev)) / (2.0 * dt);
    const FlowRates rates{-looming,
                          wrap_angle(b_next.theta - b_prev.theta) / (2.0 * dt),
                          (b_next.phi - b_prev.phi) / (2.0 * dt)};
    return {looming, derotate(rates, b_cur, omega_cam)};
}

// Signed 2D magnitude of omega for planar configurations: the component
// along the plane normal. Positive means counter-clockwise.
inline double omega_scalar_2d(const Vec3& omega, const Vec3& plane_normal) {
    if (std::abs(norm(plane_normal) - 1.0) > 1e-9)
        throw NotPlanar("omega_scalar_2d: plane normal must be unit length");
    const double s = dot(omega, plane_normal);
    if (norm(omega - plane_normal * s) > kPlanarTolerance)
        throw NotPlanar("omega_scalar_2d: omega has an off-plane component");
    return s;
}

} // namespace owl
