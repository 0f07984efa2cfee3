#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "owl/cues.hpp"
#include "owl/errors.hpp"
#include "owl/owl_domain.hpp"
#include "owl/quaternion.hpp"
#include "owl/sym_eig.hpp"
#include "owl/vec3.hpp"

namespace owl {

// Normal-equation matrices with a worse condition number than this are
// treated as rank-deficient.
inline constexpr double kConditionLimit = 1e12;

// One reconstructed point: line of sight scaled by range-over-speed, so the
// coordinates carry seconds.
struct ScaledPoint {
    int point_id{0};
    Vec3 p;
};

struct ReconstructedCloud {
    double time{0.0};
    std::vector<ScaledPoint> points;
    std::string frame{"camera"};
};

struct CloudResult {
    ReconstructedCloud cloud;
    std::vector<int> rejected_ids;   // points with ratio magnitude at or below epsilon
};

struct HeadingEstimate {
    Vec3 t_hat;
    double residual_rms{0.0};
    int n_points{0};
};

// Cone constraint t_hat . e_r = cos(alpha) contributed by one point.
struct ConeConstraint {
    Vec3 e_r;
    double alpha{0.0};
};

// Similarity (or rigid, scale = 1) transform mapping one cloud onto another,
// with the post-alignment RMS distance.
struct Alignment {
    Quaternion rotation;
    Vec3 translation;
    double scale{1.0};
    double rms{0.0};
};

// Range over speed, |r|/|t| = 1 / sqrt(looming^2 + |omega|^2), in seconds.
inline double scaled_range(double looming, const Vec3& omega) {
    const double magnitude = std::sqrt(looming * looming + norm2(omega));
    if (magnitude <= kMagnitudeEpsilon)
        throw ZeroMagnitude("scaled_range: cue magnitude at or below epsilon");
    return 1.0 / magnitude;
}

inline CloudResult reconstruct_cloud(std::span<const CueSample> samples) {
    CloudResult result;
    result.cloud.points.reserve(samples.size());
    if (!samples.empty()) result.cloud.time = samples.front().time;
    for (const CueSample& s : samples) {
        const double magnitude = std::sqrt(s.looming * s.looming + norm2(s.omega));
        if (magnitude <= kMagnitudeEpsilon) {
            result.rejected_ids.push_back(s.point_id);
            continue;
        }
        result.cloud.points.push_back({s.point_id, s.e_r / magnitude});
    }
    return result;
}

// Relative heading from a single point's cues:
// t_hat = (looming e_r + omega x e_r) / sqrt(looming^2 + |omega|^2).
inline Vec3 heading_per_point(double looming, const Vec3& omega, const Vec3& e_r) {
    const double magnitude = std::sqrt(looming * looming + norm2(omega));
    if (magnitude <= kMagnitudeEpsilon)
        throw ZeroMagnitude("heading_per_point: cue magnitude at or below epsilon");
    return (e_r * looming + cross(omega, e_r)) / magnitude;
}

// Unsigned cone half-angle between the heading and the line of sight,
// atan2(|omega|, looming) in [0, pi].
inline double alpha_from_cues(double looming, const Vec3& omega) {
    const double omega_mag = norm(omega);
    if (std::sqrt(looming * looming + omega_mag * omega_mag) <= kMagnitudeEpsilon)
        throw ZeroMagnitude("alpha_from_cues: cue magnitude at or below epsilon");
    return std::atan2(omega_mag, looming);
}

// Least-squares intersection of cone constraints: minimizes
// sum (t . e_r - cos alpha)^2 over t via the 3x3 normal equations, then
// normalizes. Falls back to the smallest-eigenvalue direction when the
// unconstrained solution collapses to zero (all constraints tangential).
inline HeadingEstimate heading_cones(std::span<const ConeConstraint> constraints) {
    if (constraints.size() < 3)
        throw InsufficientPoints("heading_cones: need at least 3 constraints, got " +
                                 std::to_string(constraints.size()));
    detail::SymMat<3> a{};
    Vec3 b;
    for (const ConeConstraint& c : constraints) {
        const double e[3] = {c.e_r.x, c.e_r.y, c.e_r.z};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) a[i][j] += e[i] * e[j];
        b += c.e_r * std::cos(c.alpha);
    }
    const auto eig = detail::jacobi_eigen<3>(a);
    if (!(eig.values[2] > 0.0) || eig.values[0] > kConditionLimit * eig.values[2])
        throw DegenerateGeometry("heading_cones: line-of-sight directions do not span 3D");

    Vec3 t;
    for (int k = 0; k < 3; ++k) {
        const Vec3 v{eig.vectors[k][0], eig.vectors[k][1], eig.vectors[k][2]};
        t += v * (dot(v, b) / eig.values[k]);
    }
    Vec3 t_hat;
    if (norm(t) > 1e-12) {
        t_hat = t / norm(t);
    } else {
        // Purely tangential constraints: best unit direction minimizing
        // t' A t is the smallest eigenvector. Fix the sign deterministically.
        t_hat = Vec3{eig.vectors[2][0], eig.vectors[2][1], eig.vectors[2][2]};
        if (t_hat.z < 0.0 || (t_hat.z == 0.0 && (t_hat.y < 0.0 || (t_hat.y == 0.0 && t_hat.x < 0.0))))
            t_hat = -t_hat;
    }

    double sq_sum = 0.0;
    for (const ConeConstraint& c : constraints) {
        const double d = dot(t_hat, c.e_r) - std::cos(c.alpha);
        sq_sum += d * d;
    }
    return {t_hat, std::sqrt(sq_sum / static_cast<double>(constraints.size())),
            static_cast<int>(constraints.size())};
}

namespace detail {

// Corresponding point pairs matched on point_id, ascending id order.
inline std::vector<std::pair<Vec3, Vec3>> matched_pairs(const ReconstructedCloud& a,
                                                        const ReconstructedCloud& b) {
    std::vector<std::pair<int, Vec3>> sa, sb;
    sa.reserve(a.points.size());
    sb.reserve(b.points.size());
    for (const auto& p : a.points) sa.emplace_back(p.point_id, p.p);
    for (const auto& p : b.points) sb.emplace_back(p.point_id, p.p);
    auto by_id = [](const auto& l, const auto& r) { return l.first < r.first; };
    std::sort(sa.begin(), sa.end(), by_id);
    std::sort(sb.begin(), sb.end(), by_id);
    std::vector<std::pair<Vec3, Vec3>> pairs;
    std::size_t i = 0, j = 0;
    while (i < sa.size() && j < sb.size()) {
        if (sa[i].first < sb[j].first) ++i;
        else if (sb[j].first < sa[i].first) ++j;
        else { pairs.emplace_back(sa[i].second, sb[j].second); ++i; ++j; }
    }
    return pairs;
}

} // namespace detail

// Least-squares rigid (or similarity) alignment of cloud a onto cloud b by
// point_id correspondence. The rotation comes from the unit-quaternion
// formulation, so it is always proper (determinant +1, never a reflection).
inline Alignment procrustes_align(const ReconstructedCloud& a, const ReconstructedCloud& b,
                                  bool allow_scale) {
    const auto pairs = detail::matched_pairs(a, b);
    if (pairs.size() < 3)
        throw InsufficientCorrespondence("procrustes_align: need at least 3 shared point ids, got " +
                                         std::to_string(pairs.size()));
    const double inv_n = 1.0 / static_cast<double>(pairs.size());
    Vec3 centroid_a, centroid_b;
    for (const auto& [pa, pb] : pairs) { centroid_a += pa; centroid_b += pb; }
    centroid_a *= inv_n;
    centroid_b *= inv_n;

    // Source spread: collinear sets leave the rotation about the line free.
    detail::SymMat<3> cov{};
    double m[3][3] = {};
    double src_norm2 = 0.0;
    for (const auto& [pa, pb] : pairs) {
        const Vec3 da = pa - centroid_a;
        const Vec3 db = pb - centroid_b;
        const double va[3] = {da.x, da.y, da.z};
        const double vb[3] = {db.x, db.y, db.z};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                cov[i][j] += va[i] * va[j];
                m[i][j] += va[i] * vb[j];
            }
        src_norm2 += norm2(da);
    }
    const auto spread = detail::jacobi_eigen<3>(cov);
    if (!(spread.values[1] > 1e-12 * spread.values[0]))
        throw DegenerateGeometry("procrustes_align: source points are collinear");

    // Horn's closed-form absolute orientation: the rotation quaternion is the
    // top eigenvector of the 4x4 matrix built from the correlation m.
    detail::SymMat<4> n{};
    n[0][0] = m[0][0] + m[1][1] + m[2][2];
    n[0][1] = n[1][0] = m[1][2] - m[2][1];
    n[0][2] = n[2][0] = m[2][0] - m[0][2];
    n[0][3] = n[3][0] = m[0][1] - m[1][0];
    n[1][1] = m[0][0] - m[1][1] - m[2][2];
    n[1][2] = n[2][1] = m[0][1] + m[1][0];
    n[1][3] = n[3][1] = m[2][0] + m[0][2];
    n[2][2] = -m[0][0] + m[1][1] - m[2][2];
    n[2][3] = n[3][2] = m[1][2] + m[2][1];
    n[3][3] = -m[0][0] - m[1][1] + m[2][2];
    const auto horn = detail::jacobi_eigen<4>(n);
    Quaternion rotation{horn.vectors[0][0],
                        {horn.vectors[0][1], horn.vectors[0][2], horn.vectors[0][3]}};
    if (rotation.w < 0.0) rotation = rotation * -1.0;
    rotation = rotation * (1.0 / norm(rotation));

    double scale = 1.0;
    if (allow_scale) {
        double corr = 0.0;
        for (const auto& [pa, pb] : pairs)
            corr += dot(pb - centroid_b, rotate_vec(rotation, pa - centroid_a));
        if (src_norm2 <= 0.0)
            throw DegenerateGeometry("procrustes_align: source cloud has no spread");
        scale = corr / src_norm2;
    }

    const Vec3 translation = centroid_b - rotate_vec(rotation, centroid_a) * scale;
    double sq_sum = 0.0;
    for (const auto& [pa, pb] : pairs) {
        const Vec3 residual = pb - (rotate_vec(rotation, pa) * scale + translation);
        sq_sum += norm2(residual);
    }
    return {rotation, translation, scale, std::sqrt(sq_sum * inv_n)};
}

inline double cloud_diameter(const ReconstructedCloud& cloud) {
    double best = 0.0;
    for (std::size_t i = 0; i < cloud.points.size(); ++i)
        for (std::size_t j = i + 1; j < cloud.points.size(); ++j)
            best = std::max(best, norm(cloud.points[i].p - cloud.points[j].p));
    return best;
}

// Worst consecutive-pair alignment residual, normalized by the diameter of
// the first cloud. Zero means perfect shape constancy.
inline double constancy_score(std::span<const ReconstructedCloud> clouds, bool allow_scale) {
    if (clouds.size() < 2)
        throw InsufficientCorrespondence("constancy_score: need at least 2 clouds");
    const double diameter = cloud_diameter(clouds.front());
    if (diameter <= 0.0)
        throw DegenerateGeometry("constancy_score: first cloud has no spatial extent");
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < clouds.size(); ++i)
        worst = std::max(worst, procrustes_align(clouds[i + 1], clouds[i], allow_scale).rms);
    return worst / diameter;
}

} // namespace owl
