#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "owl/counter_rng.hpp"
#include "owl/cues.hpp"
#include "owl/errors.hpp"
#include "owl/parallel.hpp"
#include "owl/quaternion.hpp"
#include "owl/track.hpp"
#include "owl/vec3.hpp"

namespace owl {

enum class CueMode { oracle, flow };
enum class ObjectKind { cube, grid, point_list };
enum class TrajectoryKind { rectilinear, constant_accel, circular, polyline };

// Rigid, non-rotating body sampled into tracked points. Cubes default to an
// edge-sampled wireframe; lattice = true fills the full n^3 grid.
struct ObjectSpec {
    ObjectKind kind{ObjectKind::cube};
    Vec3 position;
    Quaternion orientation;
    Vec3 velocity;
    double edge_length{1.0};
    int samples_per_edge{2};
    bool lattice{false};
    int nu{2}, nv{2};
    double spacing{1.0};
    std::vector<Vec3> points;   // point_list kind, object frame
};

struct Waypoint {
    double time{0.0};
    Vec3 position;
};

struct TrajectorySpec {
    TrajectoryKind kind{TrajectoryKind::rectilinear};
    Vec3 position;         // rectilinear / constant_accel start
    Vec3 velocity;         // rectilinear velocity, constant_accel initial velocity
    Vec3 acceleration;     // constant_accel
    Vec3 center;           // circular
    double radius{1.0};
    double angular_rate{1.0};
    double phase{0.0};
    std::vector<Waypoint> waypoints;   // polyline, strictly increasing times
};

// Piecewise-constant camera rotation: omega applies from from_time until the
// next segment starts. Before the first segment the rate is zero.
struct RotationSegment {
    double from_time{0.0};
    Vec3 omega;
};

struct NoiseSpec {
    bool enabled{false};
    double sigma_looming{0.0};       // [1/s]
    double sigma_omega{0.0};         // [rad/s], per component
};

struct SceneConfig {
    std::vector<ObjectSpec> objects;
    TrajectorySpec camera;
    std::vector<RotationSegment> rotation_profile;
    double dt{0.1};
    int n_frames{2};
    CueMode mode{CueMode::oracle};
    NoiseSpec noise;
    std::uint64_t seed{0};
};

struct ScenePoint {
    int point_id{0};
    Vec3 position;   // world, at time 0
    Vec3 velocity;   // world, constant
};

struct CueRecord {
    int frame{0};
    CueSample sample;
};

struct TruthRecord {
    int frame{0};
    double time{0.0};
    int point_id{0};
    Vec3 r;   // camera frame
    Vec3 t;   // camera frame
};

struct SkippedSample {
    int frame{0};
    int point_id{0};
    std::string reason;
};

struct SimulationResult {
    std::vector<CueRecord> cues;        // sorted by (frame, point_id)
    std::vector<TruthRecord> truth;     // all (frame, point) pairs
    std::vector<SkippedSample> skipped;
};

inline double scene_horizon(const SceneConfig& config) {
    return config.dt * (config.n_frames - 1);
}

inline void validate_scene(const SceneConfig& config) {
    if (!(config.dt > 0.0)) throw ConfigInvalid("dt: must be > 0");
    if (config.n_frames < 1) throw ConfigInvalid("n_frames: must be >= 1");
    if (config.mode == CueMode::flow && config.n_frames < 3)
        throw ConfigInvalid("n_frames: flow mode needs >= 3 frames for central differences");
    if (config.objects.empty()) throw ConfigInvalid("objects: scene has no objects");
    for (std::size_t i = 0; i < config.objects.size(); ++i) {
        const ObjectSpec& obj = config.objects[i];
        const std::string where = "objects[" + std::to_string(i) + "].";
        if (!is_unit(obj.orientation))
            throw ConfigInvalid(where + "orientation: must be a unit quaternion");
        switch (obj.kind) {
        case ObjectKind::cube:
            if (obj.samples_per_edge < 2)
                throw ConfigInvalid(where + "samples_per_edge: must be >= 2");
            if (!(obj.edge_length > 0.0))
                throw ConfigInvalid(where + "edge_length: must be > 0");
            break;
        case ObjectKind::grid:
            if (obj.nu < 2 || obj.nv < 2)
                throw ConfigInvalid(where + "nu/nv: grid needs >= 2 samples per axis");
            if (!(obj.spacing > 0.0))
                throw ConfigInvalid(where + "spacing: must be > 0");
            break;
        case ObjectKind::point_list:
            if (obj.points.empty())
                throw ConfigInvalid(where + "points: point_list has no points");
            break;
        }
    }
    if (config.noise.sigma_looming < 0.0)
        throw ConfigInvalid("noise.sigma_L: must be >= 0");
    if (config.noise.sigma_omega < 0.0)
        throw ConfigInvalid("noise.sigma_omega: must be >= 0");
    for (std::size_t i = 0; i < config.rotation_profile.size(); ++i) {
        const RotationSegment& seg = config.rotation_profile[i];
        if (seg.from_time < 0.0)
            throw ConfigInvalid("rotation_profile[" + std::to_string(i) + "].from: must be >= 0");
        if (i > 0 && !(seg.from_time > config.rotation_profile[i - 1].from_time))
            throw ConfigInvalid("rotation_profile: from times must be strictly increasing");
    }
    const TrajectorySpec& cam = config.camera;
    switch (cam.kind) {
    case TrajectoryKind::rectilinear:
        if (norm(cam.velocity) == 0.0)
            throw ConfigInvalid("camera.velocity: rectilinear trajectory needs a nonzero velocity");
        break;
    case TrajectoryKind::circular:
        if (!(cam.radius > 0.0)) throw ConfigInvalid("camera.radius: must be > 0");
        break;
    case TrajectoryKind::polyline: {
        if (cam.waypoints.size() < 2)
            throw ConfigInvalid("camera.waypoints: polyline needs >= 2 waypoints");
        for (std::size_t i = 1; i < cam.waypoints.size(); ++i)
            if (!(cam.waypoints[i].time > cam.waypoints[i - 1].time))
                throw ConfigInvalid("camera.waypoints: times must be strictly increasing");
        if (cam.waypoints.front().time > 0.0 || cam.waypoints.back().time < scene_horizon(config))
            throw ConfigInvalid("camera.waypoints: must cover [0, dt*(n_frames-1)]");
        break;
    }
    case TrajectoryKind::constant_accel:
        break;
    }
}

// Enumerates tracked points deterministically: object order, then
// lexicographic grid order within each object. Ids are contiguous from 0.
inline std::vector<ScenePoint> build_scene(const SceneConfig& config) {
    validate_scene(config);
    std::vector<ScenePoint> points;
    int next_id = 0;
    for (const ObjectSpec& obj : config.objects) {
        auto emit = [&](const Vec3& local) {
            points.push_back({next_id++, obj.position + rotate_vec(obj.orientation, local),
                              obj.velocity});
        };
        switch (obj.kind) {
        case ObjectKind::cube: {
            const int n = obj.samples_per_edge;
            const double h = obj.edge_length / 2.0;
            auto coord = [&](int idx) { return -h + obj.edge_length * idx / (n - 1); };
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        const int extremes = (i == 0 || i == n - 1) + (j == 0 || j == n - 1) +
                                             (k == 0 || k == n - 1);
                        if (!obj.lattice && extremes < 2) continue;   // keep edges and corners
                        emit({coord(i), coord(j), coord(k)});
                    }
            break;
        }
        case ObjectKind::grid:
            for (int iu = 0; iu < obj.nu; ++iu)
                for (int iv = 0; iv < obj.nv; ++iv)
                    emit({(iu - (obj.nu - 1) / 2.0) * obj.spacing,
                          (iv - (obj.nv - 1) / 2.0) * obj.spacing, 0.0});
            break;
        case ObjectKind::point_list:
            for (const Vec3& p : obj.points) emit(p);
            break;
        }
    }
    return points;
}

inline Vec3 rotation_rate_at(std::span<const RotationSegment> profile, double time) {
    Vec3 rate;
    for (const RotationSegment& seg : profile) {
        if (seg.from_time <= time) rate = seg.omega;
        else break;
    }
    return rate;
}

// Integrates the piecewise-constant body-frame profile exactly, segment by
// segment: q(t + tau) = q(t) * exp(omega * tau).
inline Quaternion orientation_at(std::span<const RotationSegment> profile, double time) {
    Quaternion q = Quaternion::identity();
    double cursor = 0.0;
    Vec3 rate;
    for (const RotationSegment& seg : profile) {
        if (seg.from_time >= time) break;
        if (seg.from_time > cursor) {
            q = quat_mul(q, quat_from_rotation_vector(rate * (seg.from_time - cursor)));
            cursor = seg.from_time;
        }
        rate = seg.omega;
    }
    q = quat_mul(q, quat_from_rotation_vector(rate * (time - cursor)));
    return q * (1.0 / norm(q));
}

inline CameraState camera_state_at(const TrajectorySpec& traj,
                                   std::span<const RotationSegment> rotation_profile,
                                   double time) {
    if (time < 0.0) throw TimeOutOfRange("camera_state_at: negative time");
    Vec3 position, velocity_world;
    switch (traj.kind) {
    case TrajectoryKind::rectilinear:
        position = traj.position + traj.velocity * time;
        velocity_world = traj.velocity;
        break;
    case TrajectoryKind::constant_accel:
        position = traj.position + traj.velocity * time + traj.acceleration * (0.5 * time * time);
        velocity_world = traj.velocity + traj.acceleration * time;
        break;
    case TrajectoryKind::circular: {
        const double a = traj.angular_rate * time + traj.phase;
        position = traj.center + Vec3{std::cos(a), std::sin(a), 0.0} * traj.radius;
        velocity_world = Vec3{-std::sin(a), std::cos(a), 0.0} * (traj.radius * traj.angular_rate);
        break;
    }
    case TrajectoryKind::polyline: {
        if (traj.waypoints.size() < 2 || time < traj.waypoints.front().time ||
            time > traj.waypoints.back().time)
            throw TimeOutOfRange("camera_state_at: time outside the polyline horizon");
        std::size_t i = 0;
        while (i + 2 < traj.waypoints.size() && traj.waypoints[i + 1].time <= time) ++i;
        const Waypoint& a = traj.waypoints[i];
        const Waypoint& b = traj.waypoints[i + 1];
        velocity_world = (b.position - a.position) / (b.time - a.time);
        position = a.position + velocity_world * (time - a.time);
        break;
    }
    }
    const Quaternion orientation = orientation_at(rotation_profile, time);
    const Quaternion world_to_cam = conjugate(orientation);
    return {position, orientation, rotate_vec(world_to_cam, velocity_world),
            rotation_rate_at(rotation_profile, time)};
}

// Samples one point's relative motion over the configured frames. Moving
// point plus moving camera collapse into a single relative motion: the range
// vector and the camera-relative translation, both in the camera frame.
inline Track relative_track(const ScenePoint& point, const SceneConfig& config) {
    Track track;
    track.point_id = point.point_id;
    track.times.reserve(config.n_frames);
    track.rel_positions.reserve(config.n_frames);
    track.rel_velocities.reserve(config.n_frames);
    for (int k = 0; k < config.n_frames; ++k) {
        const double time = k * config.dt;
        const CameraState cam = camera_state_at(config.camera, config.rotation_profile, time);
        const Quaternion world_to_cam = conjugate(cam.orientation);
        const Vec3 offset_world = point.position + point.velocity * time - cam.position;
        track.times.push_back(time);
        track.rel_positions.push_back(rotate_vec(world_to_cam, offset_world));
        track.rel_velocities.push_back(cam.velocity_t - rotate_vec(world_to_cam, point.velocity));
    }
    return track;
}

// Runs the scene: per frame, per point cue synthesis in oracle or flow mode,
// with optional additive Gaussian noise drawn from counters keyed by
// (seed, frame, point_id). Untenable samples (polar crossing, vanishing
// range, missing neighbours) are flagged, never fabricated. Rows come out
// sorted by (frame, point_id) regardless of the thread budget.
inline SimulationResult simulate(const SceneConfig& config) {
    validate_scene(config);
    const std::vector<ScenePoint> points = build_scene(config);
    const int n_frames = config.n_frames;

    std::vector<Vec3> omega_at(n_frames);
    for (int k = 0; k < n_frames; ++k)
        omega_at[k] = rotation_rate_at(config.rotation_profile, k * config.dt);

    struct Slot {
        bool has_cue = false;
        bool skipped = false;
        CueSample cue;
        TruthRecord truth;
        std::string reason;
    };
    std::vector<Slot> slots(points.size() * static_cast<std::size_t>(n_frames));

    parallel_for(points.size(), thread_budget(), [&](std::size_t pi) {
        const ScenePoint& point = points[pi];
        const Track track = relative_track(point, config);
        for (int k = 0; k < n_frames; ++k) {
            Slot& slot = slots[pi * n_frames + k];
            const Vec3& r = track.rel_positions[k];
            const Vec3& t = track.rel_velocities[k];
            slot.truth = {k, track.times[k], point.point_id, r, t};
            try {
                Cues cues;
                if (config.mode == CueMode::oracle) {
                    cues = cues_oracle(t, r);
                } else {
                    if (k == 0 || k == n_frames - 1) {
                        slot.skipped = true;
                        slot.reason = "no neighbour frame for central differences";
                        continue;
                    }
                    cues = cues_from_track(track, k, config.dt, omega_at[k]);
                }
                if (config.noise.enabled) {
                    const auto id = static_cast<std::uint64_t>(point.point_id);
                    cues.looming += config.noise.sigma_looming *
                                    counter_gaussian(config.seed, k, id, 0);
                    cues.omega.x += config.noise.sigma_omega * counter_gaussian(config.seed, k, id, 1);
                    cues.omega.y += config.noise.sigma_omega * counter_gaussian(config.seed, k, id, 2);
                    cues.omega.z += config.noise.sigma_omega * counter_gaussian(config.seed, k, id, 3);
                }
                slot.cue = {point.point_id, track.times[k], cues.looming, cues.omega,
                            r / norm(r), bearing_of(r)};
                slot.has_cue = true;
            } catch (const Error& e) {
                slot.skipped = true;
                slot.reason = e.what();
            }
        }
    });

    SimulationResult result;
    result.truth.reserve(slots.size());
    for (int k = 0; k < n_frames; ++k) {
        for (std::size_t pi = 0; pi < points.size(); ++pi) {
            const Slot& slot = slots[pi * n_frames + k];
            result.truth.push_back(slot.truth);
            if (slot.has_cue) result.cues.push_back({k, slot.cue});
            if (slot.skipped)
                result.skipped.push_back({k, points[pi].point_id, slot.reason});
        }
    }
    return result;
}

} // namespace owl
