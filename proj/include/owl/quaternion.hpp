#pragma once

#include <cmath>

#include "owl/errors.hpp"
#include "owl/vec3.hpp"

namespace owl {

// Hamilton quaternion, scalar-first storage. Pure quaternions (w == 0)
// carry ordinary 3-vectors through quaternion algebra.
struct Quaternion {
    double w{1.0};
    Vec3 v{};

    Quaternion() = default;
    Quaternion(double w_, const Vec3& v_) : w(w_), v(v_) {}

    static Quaternion identity() { return {}; }
    static Quaternion pure(const Vec3& vec) { return {0.0, vec}; }

    bool is_pure() const { return w == 0.0; }

    bool operator==(const Quaternion&) const = default;
};

inline double norm2(const Quaternion& q) { return q.w * q.w + norm2(q.v); }
inline double norm(const Quaternion& q) { return std::sqrt(norm2(q)); }

inline Quaternion conjugate(const Quaternion& q) { return {q.w, -q.v}; }

inline Quaternion operator*(const Quaternion& q, double s) { return {q.w * s, q.v * s}; }
inline Quaternion operator*(double s, const Quaternion& q) { return q * s; }
inline Quaternion operator+(const Quaternion& a, const Quaternion& b) { return {a.w + b.w, a.v + b.v}; }
inline Quaternion operator-(const Quaternion& a, const Quaternion& b) { return {a.w - b.w, a.v - b.v}; }

// Hamilton product. For pure quaternions this reduces to
// (0,a) * (0,b) = (-a.b, a x b).
inline Quaternion quat_mul(const Quaternion& a, const Quaternion& b) {
    return {a.w * b.w - dot(a.v, b.v),
            a.v * b.w + b.v * a.w + cross(a.v, b.v)};
}

inline Quaternion quat_inv(const Quaternion& q) {
    const double n2 = norm2(q);
    if (n2 == 0.0) throw ZeroQuaternion("quat_inv: zero quaternion has no inverse");
    return conjugate(q) * (1.0 / n2);
}

inline bool is_unit(const Quaternion& q, double tol = 1e-9) {
    return std::abs(norm(q) - 1.0) <= tol;
}

// Rotates v by the unit quaternion q via the sandwich product
// q * (0,v) * q^-1.
inline Vec3 rotate_vec(const Quaternion& q, const Vec3& v) {
    if (!is_unit(q)) throw NotUnitQuaternion("rotate_vec: quaternion is not unit length");
    return quat_mul(quat_mul(q, Quaternion::pure(v)), quat_inv(q)).v;
}

// Unit quaternion for a rotation of angle |w| about w/|w|; identity for w = 0.
inline Quaternion quat_from_rotation_vector(const Vec3& w) {
    const double angle = norm(w);
    if (angle == 0.0) return Quaternion::identity();
    const double half = 0.5 * angle;
    return {std::cos(half), w * (std::sin(half) / angle)};
}

} // namespace owl
