#pragma once

#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "owl/cues.hpp"
#include "owl/errors.hpp"
#include "owl/quaternion.hpp"
#include "owl/track.hpp"
#include "owl/vec3.hpp"

namespace owl {

// Ratio values with total magnitude at or below this are treated as "at
// infinity": the reciprocal diverges.
inline constexpr double kMagnitudeEpsilon = 1e-12;

// Planar ratio value. Units follow the role: [1/s] for translation-over-range
// values, [s] for their reciprocals.
using ComplexVal = std::complex<double>;

// Quaternion ratio of relative translation to range: scalar part is the
// looming [1/s], vector part the perceived rotation [rad/s].
struct ToR {
    Quaternion q;

    double looming() const { return q.w; }
    Vec3 omega() const { return q.v; }
    double magnitude() const { return norm(q); }
};

// Reciprocal ratio, range over translation [s]. Its magnitude reads as range
// divided by speed.
struct RoT {
    Quaternion q;

    double magnitude() const { return norm(q); }
};

// One plotted point of a planar trajectory mapped into the display plane.
struct OwlTrajectorySample {
    double time{0.0};
    ComplexVal value;   // [s]
};

inline ComplexVal tover_r_complex(double looming, double omega_scalar) {
    return {looming, omega_scalar};
}

// Reciprocal followed by a 90-degree CCW display rotation, so the direction
// of motion plots upward. |owl_complex(z)| = 1/|z|.
inline ComplexVal owl_complex(const ComplexVal& z) {
    if (std::abs(z) <= kMagnitudeEpsilon)
        throw ZeroMagnitude("owl_complex: value at or below magnitude epsilon");
    const ComplexVal inv = 1.0 / z;
    return {-inv.imag(), inv.real()};
}

inline ToR tor_from_cues(double looming, const Vec3& omega) {
    return {Quaternion{looming, omega}};
}

// Literal quaternion route T * R^-1 with T = (0,t) and R = (0,r). Must agree
// with tor_from_cues(cues_oracle(t, r)) to machine precision.
inline ToR tor_from_vectors(const Vec3& t, const Vec3& r) {
    const double range2 = norm2(r);
    if (std::sqrt(range2) <= kRangeEpsilon)
        throw RangeTooSmall("tor_from_vectors: |r| <= " + std::to_string(kRangeEpsilon));
    const Quaternion range_inv = Quaternion::pure(r * (-1.0 / range2));
    return {quat_mul(Quaternion::pure(t), range_inv)};
}

inline RoT rot_from_tor(const ToR& tor) {
    const double n2 = norm2(tor.q);
    if (std::sqrt(n2) <= kMagnitudeEpsilon)
        throw ZeroMagnitude("rot_from_tor: ToR magnitude at or below epsilon");
    return {conjugate(tor.q) * (1.0 / n2)};
}

// Maps a planar track into the display plane, one value per sample. The
// observer is anchored at the origin; rel_velocities follow the Track
// convention (camera-relative translation, so the negated point velocity).
inline std::vector<OwlTrajectorySample> owl_trajectory(const Track& track,
                                                       const Vec3& plane_normal) {
    std::vector<OwlTrajectorySample> out;
    out.reserve(track.size());
    for (std::size_t k = 0; k < track.size(); ++k) {
        if (norm(track.rel_velocities[k]) == 0.0)
            throw ZeroVelocitySample("owl_trajectory: zero relative velocity at sample " +
                                     std::to_string(k));
        const Cues cues = cues_oracle(track.rel_velocities[k], track.rel_positions[k]);
        const double omega_2d = omega_scalar_2d(cues.omega, plane_normal);
        out.push_back({track.times[k], owl_complex(tover_r_complex(cues.looming, omega_2d))});
    }
    return out;
}

// Samples the locus of constant looming for a camera translating along +x at
// speed t_mag: the sphere |r| = (t_mag / looming_level) cos(alpha) through
// the origin. n_samples is the number of alpha stations; each off-axis
// station carries n_samples azimuth samples.
inline std::vector<Vec3> iso_looming_sphere(double t_mag, double looming_level,
                                            int n_samples) {
    if (t_mag <= 0.0 || looming_level <= 0.0 || n_samples <= 0)
        throw NonPositiveParameter("iso_looming_sphere: t_mag, level, and n_samples must be positive");
    const double diameter = t_mag / looming_level;
    std::vector<Vec3> points;
    points.reserve(1 + static_cast<std::size_t>(n_samples) * n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double alpha = (std::numbers::pi / 2.0) * i / n_samples;
        if (i == 0) {
            points.push_back({diameter, 0.0, 0.0});   // boresight; azimuth degenerate
            continue;
        }
        const double range = diameter * std::cos(alpha);
        const double sa = std::sin(alpha), ca = std::cos(alpha);
        for (int j = 0; j < n_samples; ++j) {
            const double psi = 2.0 * std::numbers::pi * j / n_samples;
            points.push_back(Vec3{ca, sa * std::cos(psi), sa * std::sin(psi)} * range);
        }
    }
    return points;
}

// Samples the locus of constant |omega| for the same camera motion: the
// spindle torus |r| = (t_mag / omega_level) sin(alpha), alpha in (0, pi).
// Odd n_samples places a station exactly on the equatorial ring.
inline std::vector<Vec3> iso_omega_torus(double t_mag, double omega_level,
                                         int n_samples) {
    if (t_mag <= 0.0 || omega_level <= 0.0 || n_samples <= 0)
        throw NonPositiveParameter("iso_omega_torus: t_mag, level, and n_samples must be positive");
    const double ring_radius = t_mag / omega_level;
    std::vector<Vec3> points;
    points.reserve(static_cast<std::size_t>(n_samples) * n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double alpha = std::numbers::pi * (i + 1) / (n_samples + 1);
        const double range = ring_radius * std::sin(alpha);
        const double sa = std::sin(alpha), ca = std::cos(alpha);
        for (int j = 0; j < n_samples; ++j) {
            const double psi = 2.0 * std::numbers::pi * j / n_samples;
            points.push_back(Vec3{ca, sa * std::cos(psi), sa * std::sin(psi)} * range);
        }
    }
    return points;
}

} // namespace owl
