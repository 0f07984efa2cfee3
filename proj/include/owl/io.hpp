#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "owl/errors.hpp"
#include "owl/owl_domain.hpp"
#include "owl/simulator.hpp"
#include "owl/vec3.hpp"

namespace owl::io {

using json = nlohmann::json;

inline constexpr const char* kCuesHeader =
    "frame,time,point_id,theta,phi,L,wx,wy,wz,erx,ery,erz";
inline constexpr const char* kTruthHeader =
    "frame,time,point_id,rx,ry,rz,tx,ty,tz";

// 17 significant digits round-trip doubles exactly; "%.17g" is
// locale-independent as long as the global locale stays "C".
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

// Digest of the canonical (parsed and re-serialized, keys sorted, whitespace
// dropped) form of a config document.
inline std::string config_digest(const json& config) {
    const std::string canonical = config.dump();
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical)));
    return buf;
}

inline json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigInvalid(path.string() + ": " + e.what());
    }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out.good()) throw IoError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// CSV / PLY emission
// ---------------------------------------------------------------------------

inline void write_cues_csv(const std::filesystem::path& path,
                           std::span<const CueRecord> rows) {
    std::ostringstream out;
    out << kCuesHeader << '\n';
    for (const CueRecord& row : rows) {
        const CueSample& s = row.sample;
        out << row.frame << ',' << format_double(s.time) << ',' << s.point_id << ','
            << format_double(s.bearing.theta) << ',' << format_double(s.bearing.phi) << ','
            << format_double(s.looming) << ','
            << format_double(s.omega.x) << ',' << format_double(s.omega.y) << ','
            << format_double(s.omega.z) << ','
            << format_double(s.e_r.x) << ',' << format_double(s.e_r.y) << ','
            << format_double(s.e_r.z) << '\n';
    }
    write_text(path, out.str());
}

inline void write_truth_csv(const std::filesystem::path& path,
                            std::span<const TruthRecord> rows) {
    std::ostringstream out;
    out << kTruthHeader << '\n';
    for (const TruthRecord& row : rows) {
        out << row.frame << ',' << format_double(row.time) << ',' << row.point_id << ','
            << format_double(row.r.x) << ',' << format_double(row.r.y) << ','
            << format_double(row.r.z) << ','
            << format_double(row.t.x) << ',' << format_double(row.t.y) << ','
            << format_double(row.t.z) << '\n';
    }
    write_text(path, out.str());
}

inline void write_ply(const std::filesystem::path& path, std::span<const Vec3> vertices) {
    std::ostringstream out;
    out << "ply\nformat ascii 1.0\nelement vertex " << vertices.size()
        << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
    for (const Vec3& v : vertices)
        out << format_double(v.x) << ' ' << format_double(v.y) << ' '
            << format_double(v.z) << '\n';
    write_text(path, out.str());
}

inline void write_owl_traj_csv(const std::filesystem::path& path,
                               std::span<const OwlTrajectorySample> samples) {
    std::ostringstream out;
    out << "time,re,im\n";
    for (const OwlTrajectorySample& s : samples)
        out << format_double(s.time) << ',' << format_double(s.value.real()) << ','
            << format_double(s.value.imag()) << '\n';
    write_text(path, out.str());
}

// ---------------------------------------------------------------------------
// CSV parsing
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

inline double parse_double(std::string_view field, const std::string& file, int row,
                           const char* column) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ConfigInvalid(file + " row " + std::to_string(row) + ": bad value in column '" +
                            column + "'");
    return value;
}

inline int parse_int(std::string_view field, const std::string& file, int row,
                     const char* column) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ConfigInvalid(file + " row " + std::to_string(row) + ": bad value in column '" +
                            column + "'");
    return value;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

} // namespace detail

inline std::vector<CueRecord> read_cues_csv(const std::filesystem::path& path) {
    const auto lines = detail::read_lines(path);
    const std::string name = path.filename().string();
    if (lines.empty() || lines[0] != kCuesHeader)
        throw ConfigInvalid(name + " row 1: expected header '" + kCuesHeader + "'");
    std::vector<CueRecord> rows;
    rows.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const int row = static_cast<int>(i) + 1;
        const auto f = detail::split_fields(lines[i]);
        if (f.size() != 12)
            throw ConfigInvalid(name + " row " + std::to_string(row) + ": expected 12 fields, got " +
                                std::to_string(f.size()));
        CueRecord rec;
        rec.frame = detail::parse_int(f[0], name, row, "frame");
        rec.sample.time = detail::parse_double(f[1], name, row, "time");
        rec.sample.point_id = detail::parse_int(f[2], name, row, "point_id");
        rec.sample.bearing.theta = detail::parse_double(f[3], name, row, "theta");
        rec.sample.bearing.phi = detail::parse_double(f[4], name, row, "phi");
        rec.sample.looming = detail::parse_double(f[5], name, row, "L");
        rec.sample.omega = {detail::parse_double(f[6], name, row, "wx"),
                            detail::parse_double(f[7], name, row, "wy"),
                            detail::parse_double(f[8], name, row, "wz")};
        rec.sample.e_r = {detail::parse_double(f[9], name, row, "erx"),
                          detail::parse_double(f[10], name, row, "ery"),
                          detail::parse_double(f[11], name, row, "erz")};
        rows.push_back(rec);
    }
    return rows;
}

inline std::vector<TruthRecord> read_truth_csv(const std::filesystem::path& path) {
    const auto lines = detail::read_lines(path);
    const std::string name = path.filename().string();
    if (lines.empty() || lines[0] != kTruthHeader)
        throw ConfigInvalid(name + " row 1: expected header '" + kTruthHeader + "'");
    std::vector<TruthRecord> rows;
    rows.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const int row = static_cast<int>(i) + 1;
        const auto f = detail::split_fields(lines[i]);
        if (f.size() != 9)
            throw ConfigInvalid(name + " row " + std::to_string(row) + ": expected 9 fields, got " +
                                std::to_string(f.size()));
        TruthRecord rec;
        rec.frame = detail::parse_int(f[0], name, row, "frame");
        rec.time = detail::parse_double(f[1], name, row, "time");
        rec.point_id = detail::parse_int(f[2], name, row, "point_id");
        rec.r = {detail::parse_double(f[3], name, row, "rx"),
                 detail::parse_double(f[4], name, row, "ry"),
                 detail::parse_double(f[5], name, row, "rz")};
        rec.t = {detail::parse_double(f[6], name, row, "tx"),
                 detail::parse_double(f[7], name, row, "ty"),
                 detail::parse_double(f[8], name, row, "tz")};
        rows.push_back(rec);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Config documents
// ---------------------------------------------------------------------------

namespace detail {

inline const json& require(const json& j, const char* key, const std::string& where) {
    const auto it = j.find(key);
    if (it == j.end()) throw ConfigInvalid(where + key + ": missing");
    return *it;
}

inline double number(const json& j, const char* key, const std::string& where) {
    const json& v = require(j, key, where);
    if (!v.is_number()) throw ConfigInvalid(where + key + ": expected a number");
    return v.get<double>();
}

inline double number_or(const json& j, const char* key, const std::string& where,
                        double fallback) {
    if (!j.contains(key)) return fallback;
    return number(j, key, where);
}

inline int integer(const json& j, const char* key, const std::string& where) {
    const json& v = require(j, key, where);
    if (!v.is_number_integer()) throw ConfigInvalid(where + key + ": expected an integer");
    return v.get<int>();
}

inline Vec3 vec3_value(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
        !v[2].is_number())
        throw ConfigInvalid(where + ": expected [x, y, z]");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

inline Vec3 vec3_field(const json& j, const char* key, const std::string& where) {
    return vec3_value(require(j, key, where), where + key);
}

inline Vec3 vec3_or(const json& j, const char* key, const std::string& where,
                    const Vec3& fallback) {
    if (!j.contains(key)) return fallback;
    return vec3_value(j[key], where + key);
}

inline Quaternion quat_or_identity(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) return Quaternion::identity();
    const json& v = j[key];
    if (!v.is_array() || v.size() != 4)
        throw ConfigInvalid(where + key + ": expected [w, x, y, z]");
    return {v[0].get<double>(), {v[1].get<double>(), v[2].get<double>(), v[3].get<double>()}};
}

inline TrajectorySpec trajectory_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigInvalid(where + ": expected an object");
    const std::string kind = require(j, "kind", where).get<std::string>();
    TrajectorySpec traj;
    if (kind == "rectilinear") {
        traj.kind = TrajectoryKind::rectilinear;
        traj.position = vec3_or(j, "position", where, {});
        traj.velocity = vec3_field(j, "velocity", where);
    } else if (kind == "constant_accel") {
        traj.kind = TrajectoryKind::constant_accel;
        traj.position = vec3_or(j, "position", where, {});
        traj.velocity = vec3_or(j, "velocity", where, {});
        traj.acceleration = vec3_field(j, "acceleration", where);
    } else if (kind == "circular") {
        traj.kind = TrajectoryKind::circular;
        traj.center = vec3_or(j, "center", where, {});
        traj.radius = number(j, "radius", where);
        traj.angular_rate = number(j, "angular_rate", where);
        traj.phase = number_or(j, "phase", where, 0.0);
    } else if (kind == "polyline") {
        traj.kind = TrajectoryKind::polyline;
        const json& pts = require(j, "waypoints", where);
        if (!pts.is_array()) throw ConfigInvalid(where + "waypoints: expected an array");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const std::string wp = where + "waypoints[" + std::to_string(i) + "].";
            traj.waypoints.push_back({number(pts[i], "time", wp),
                                      vec3_field(pts[i], "position", wp)});
        }
    } else {
        throw ConfigInvalid(where + "kind: unknown trajectory kind '" + kind + "'");
    }
    return traj;
}

inline ObjectSpec object_from_json(const json& j, const std::string& where) {
    const std::string kind = require(j, "kind", where).get<std::string>();
    ObjectSpec obj;
    obj.position = vec3_or(j, "position", where, {});
    obj.orientation = quat_or_identity(j, "orientation", where);
    obj.velocity = vec3_or(j, "velocity", where, {});
    if (kind == "cube") {
        obj.kind = ObjectKind::cube;
        obj.edge_length = number(j, "edge_length", where);
        obj.samples_per_edge = integer(j, "samples_per_edge", where);
        obj.lattice = j.value("lattice", false);
    } else if (kind == "grid") {
        obj.kind = ObjectKind::grid;
        obj.nu = integer(j, "nu", where);
        obj.nv = integer(j, "nv", where);
        obj.spacing = number(j, "spacing", where);
    } else if (kind == "point_list") {
        obj.kind = ObjectKind::point_list;
        const json& pts = require(j, "points", where);
        if (!pts.is_array()) throw ConfigInvalid(where + "points: expected an array");
        for (std::size_t i = 0; i < pts.size(); ++i)
            obj.points.push_back(vec3_value(pts[i], where + "points[" + std::to_string(i) + "]"));
    } else {
        throw ConfigInvalid(where + "kind: unknown object kind '" + kind + "'");
    }
    return obj;
}

} // namespace detail

inline SceneConfig scene_config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigInvalid("config: expected a JSON object");
    SceneConfig config;
    config.dt = detail::number(j, "dt", "");
    config.n_frames = detail::integer(j, "n_frames", "");
    config.seed = j.value("seed", std::uint64_t{0});
    const std::string mode = detail::require(j, "mode", "").get<std::string>();
    if (mode == "oracle") config.mode = CueMode::oracle;
    else if (mode == "flow") config.mode = CueMode::flow;
    else throw ConfigInvalid("mode: expected 'oracle' or 'flow'");

    config.camera = detail::trajectory_from_json(detail::require(j, "camera", ""), "camera.");

    if (j.contains("rotation_profile")) {
        const json& profile = j["rotation_profile"];
        if (!profile.is_array()) throw ConfigInvalid("rotation_profile: expected an array");
        for (std::size_t i = 0; i < profile.size(); ++i) {
            const std::string where = "rotation_profile[" + std::to_string(i) + "].";
            config.rotation_profile.push_back({detail::number(profile[i], "from", where),
                                               detail::vec3_field(profile[i], "omega", where)});
        }
    }

    if (j.contains("noise")) {
        const json& noise = j["noise"];
        config.noise.enabled = noise.value("enabled", false);
        config.noise.sigma_looming = detail::number_or(noise, "sigma_L", "noise.", 0.0);
        config.noise.sigma_omega = detail::number_or(noise, "sigma_omega", "noise.", 0.0);
    }

    const json& objects = detail::require(j, "objects", "");
    if (!objects.is_array() || objects.empty())
        throw ConfigInvalid("objects: expected a non-empty array");
    for (std::size_t i = 0; i < objects.size(); ++i)
        config.objects.push_back(
            detail::object_from_json(objects[i], "objects[" + std::to_string(i) + "]."));

    validate_scene(config);
    return config;
}

// Planar-track config for trajectory mapping: point trajectories observed
// from the origin.
struct OwlMapConfig {
    double dt{0.1};
    int n_samples{2};
    Vec3 plane_normal{0.0, 0.0, 1.0};
    std::vector<TrajectorySpec> tracks;
};

inline OwlMapConfig owlmap_config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigInvalid("config: expected a JSON object");
    OwlMapConfig config;
    config.dt = detail::number(j, "dt", "");
    if (!(config.dt > 0.0)) throw ConfigInvalid("dt: must be > 0");
    config.n_samples = detail::integer(j, "n_samples", "");
    if (config.n_samples < 1) throw ConfigInvalid("n_samples: must be >= 1");
    config.plane_normal = detail::vec3_or(j, "plane_normal", "", {0.0, 0.0, 1.0});
    const json& tracks = detail::require(j, "tracks", "");
    if (!tracks.is_array() || tracks.empty())
        throw ConfigInvalid("tracks: expected a non-empty array");
    for (std::size_t i = 0; i < tracks.size(); ++i)
        config.tracks.push_back(detail::trajectory_from_json(
            tracks[i], "tracks[" + std::to_string(i) + "]."));
    return config;
}

// Samples a point trajectory into a Track as seen by an origin-anchored
// observer. The relative translation is the negated point velocity, per the
// Track convention.
inline Track track_from_trajectory(const TrajectorySpec& traj, double dt, int n_samples,
                                   int point_id = 0) {
    Track track;
    track.point_id = point_id;
    for (int k = 0; k < n_samples; ++k) {
        const CameraState state = camera_state_at(traj, {}, k * dt);
        track.times.push_back(k * dt);
        track.rel_positions.push_back(state.position);
        track.rel_velocities.push_back(-state.velocity_t);
    }
    return track;
}

} // namespace owl::io
