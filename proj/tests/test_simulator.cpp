#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "owl/owl_domain.hpp"
#include "owl/simulator.hpp"

#include "helpers.hpp"

using namespace owl;
using owl::test::max_component_diff;

namespace {

constexpr double pi = std::numbers::pi;

SceneConfig cube_scene(CueMode mode, int n_frames, double dt) {
    SceneConfig config;
    ObjectSpec cube;
    cube.kind = ObjectKind::cube;
    cube.position = {8, 0, 0};
    cube.edge_length = 2.0;
    cube.samples_per_edge = 2;
    config.objects.push_back(cube);
    config.camera.kind = TrajectoryKind::rectilinear;
    config.camera.position = {0, 0, 0};
    config.camera.velocity = {1, 0, 0};
    config.dt = dt;
    config.n_frames = n_frames;
    config.mode = mode;
    return config;
}

// Camera pinned to the origin over [0, horizon].
TrajectorySpec static_camera(double horizon) {
    TrajectorySpec traj;
    traj.kind = TrajectoryKind::polyline;
    traj.waypoints = {{0.0, {0, 0, 0}}, {horizon, {0, 0, 0}}};
    return traj;
}

bool same_cues(const std::vector<CueRecord>& a, const std::vector<CueRecord>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const CueSample& sa = a[i].sample;
        const CueSample& sb = b[i].sample;
        if (a[i].frame != b[i].frame || sa.point_id != sb.point_id || sa.time != sb.time ||
            sa.looming != sb.looming || !(sa.omega == sb.omega) || !(sa.e_r == sb.e_r) ||
            sa.bearing.theta != sb.bearing.theta || sa.bearing.phi != sb.bearing.phi)
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("build_scene: cube corner and wireframe counts") {
    SceneConfig config = cube_scene(CueMode::oracle, 2, 0.1);
    auto points = build_scene(config);
    REQUIRE(points.size() == 8);   // samples_per_edge = 2: corners only
    for (const auto& p : points) {
        CHECK(std::abs(std::abs(p.position.x - 8.0) - 1.0) < 1e-15);
        CHECK(std::abs(std::abs(p.position.y) - 1.0) < 1e-15);
        CHECK(std::abs(std::abs(p.position.z) - 1.0) < 1e-15);
    }

    config.objects[0].samples_per_edge = 3;
    CHECK(build_scene(config).size() == 20);   // 8 corners + 12 edge midpoints

    config.objects[0].lattice = true;
    CHECK(build_scene(config).size() == 27);
}

TEST_CASE("build_scene: grid lands on integer coordinates") {
    SceneConfig config;
    ObjectSpec grid;
    grid.kind = ObjectKind::grid;
    grid.nu = 3;
    grid.nv = 3;
    grid.spacing = 1.0;
    config.objects.push_back(grid);
    config.camera.velocity = {1, 0, 0};
    const auto points = build_scene(config);
    REQUIRE(points.size() == 9);
    for (const auto& p : points) {
        CHECK(p.position.x == std::round(p.position.x));
        CHECK(p.position.y == std::round(p.position.y));
        CHECK(p.position.z == 0.0);
    }
}

TEST_CASE("build_scene: ids are disjoint and contiguous across objects") {
    SceneConfig config = cube_scene(CueMode::oracle, 2, 0.1);
    ObjectSpec list;
    list.kind = ObjectKind::point_list;
    list.points = {{1, 2, 3}, {4, 5, 6}};
    config.objects.push_back(list);
    const auto points = build_scene(config);
    REQUIRE(points.size() == 10);
    for (std::size_t i = 0; i < points.size(); ++i)
        CHECK(points[i].point_id == static_cast<int>(i));
}

TEST_CASE("camera_state_at closed forms") {
    TrajectorySpec rect;
    rect.kind = TrajectoryKind::rectilinear;
    rect.velocity = {1, 0, 0};
    const CameraState r2 = camera_state_at(rect, {}, 2.0);
    CHECK(max_component_diff(r2.position, {2, 0, 0}) == 0.0);
    CHECK(max_component_diff(r2.velocity_t, {1, 0, 0}) == 0.0);

    TrajectorySpec accel;
    accel.kind = TrajectoryKind::constant_accel;
    accel.acceleration = {0, 1, 0};
    const CameraState a2 = camera_state_at(accel, {}, 2.0);
    CHECK(max_component_diff(a2.position, {0, 2, 0}) == 0.0);
    CHECK(max_component_diff(a2.velocity_t, {0, 2, 0}) == 0.0);

    TrajectorySpec circ;
    circ.kind = TrajectoryKind::circular;
    circ.radius = 1.0;
    circ.angular_rate = 1.0;
    const CameraState c = camera_state_at(circ, {}, pi / 2);
    CHECK(norm(c.velocity_t) == Catch::Approx(1.0).margin(1e-12));
    CHECK(std::abs(dot(c.velocity_t, c.position - circ.center)) < 1e-12);
    // velocity against central differences of position
    const Vec3 fd = (camera_state_at(circ, {}, pi / 2 + 1e-6).position -
                     camera_state_at(circ, {}, pi / 2 - 1e-6).position) /
                    2e-6;
    CHECK(max_component_diff(fd, c.velocity_t) < 1e-8);

    TrajectorySpec poly;
    poly.kind = TrajectoryKind::polyline;
    poly.waypoints = {{0.0, {0, 0, 0}}, {1.0, {1, 0, 0}}, {3.0, {1, 4, 0}}};
    CHECK(max_component_diff(camera_state_at(poly, {}, 0.5).position, {0.5, 0, 0}) < 1e-15);
    CHECK(max_component_diff(camera_state_at(poly, {}, 2.0).velocity_t, {0, 2, 0}) < 1e-15);
    CHECK_THROWS_AS(camera_state_at(poly, {}, 3.5), TimeOutOfRange);
    CHECK_THROWS_AS(camera_state_at(rect, {}, -0.1), TimeOutOfRange);
}

TEST_CASE("orientation integrates the rotation profile piecewise") {
    const std::vector<RotationSegment> profile{{0.0, {0, 0, 0.5}}, {2.0, {0, 0, -1.0}}};

    // during the first segment: yaw = 0.5 t
    const Quaternion q1 = orientation_at(profile, 1.0);
    CHECK(max_component_diff(rotate_vec(q1, {1, 0, 0}),
                             {std::cos(0.5), std::sin(0.5), 0}) < 1e-12);

    // after the switch at t = 2: yaw = 1.0 - 1.0 (t - 2), zero again at t = 3
    const Quaternion q3 = orientation_at(profile, 3.0);
    CHECK(max_component_diff(rotate_vec(q3, {1, 0, 0}), {1, 0, 0}) < 1e-12);

    CHECK(max_component_diff(rotation_rate_at(profile, 1.0), {0, 0, 0.5}) == 0.0);
    CHECK(max_component_diff(rotation_rate_at(profile, 2.5), {0, 0, -1.0}) == 0.0);
}

TEST_CASE("relative_track worked cases") {
    SceneConfig config = cube_scene(CueMode::oracle, 4, 1.0);

    const ScenePoint stationary{0, {5, 0, 0}, {0, 0, 0}};
    const Track track = relative_track(stationary, config);
    for (int k = 0; k < 4; ++k) {
        CHECK(max_component_diff(track.rel_positions[k], {5.0 - k, 0, 0}) < 1e-15);
        CHECK(max_component_diff(track.rel_velocities[k], {1, 0, 0}) < 1e-15);
    }

    // Point moving with the camera: relative rest.
    const ScenePoint comoving{1, {5, 0, 0}, {1, 0, 0}};
    const Track rest = relative_track(comoving, config);
    for (int k = 0; k < 4; ++k) {
        CHECK(max_component_diff(rest.rel_positions[k], {5, 0, 0}) < 1e-15);
        CHECK(norm(rest.rel_velocities[k]) == 0.0);
    }

    // Point moving past a pinned camera: the relative track follows the point.
    const ScenePoint drifting{2, {5, 0, 0}, {0, 1, 0}};
    SceneConfig still = config;
    still.camera = static_camera(3.0);
    const Track drift = relative_track(drifting, still);
    for (int k = 0; k < 4; ++k) {
        CHECK(max_component_diff(drift.rel_positions[k], {5.0, 1.0 * k, 0.0}) < 1e-14);
        CHECK(max_component_diff(drift.rel_velocities[k], {0, -1, 0}) < 1e-15);
    }
}

TEST_CASE("simulate: oracle cube satisfies the cue invariants against the sidecar") {
    const SimulationResult result = simulate(cube_scene(CueMode::oracle, 50, 0.1));
    REQUIRE(result.cues.size() == 400);   // 50 frames x 8 corners
    REQUIRE(result.truth.size() == 400);
    CHECK(result.skipped.empty());

    double worst_orth = 0.0, worst_mag = 0.0;
    for (std::size_t i = 0; i < result.cues.size(); ++i) {
        const CueSample& cue = result.cues[i].sample;
        const TruthRecord& truth = result.truth[i];
        REQUIRE(cue.point_id == truth.point_id);
        worst_orth = std::max(worst_orth, std::abs(dot(cue.omega, cue.e_r)));
        const double tor_mag = tor_from_cues(cue.looming, cue.omega).magnitude();
        worst_mag = std::max(worst_mag,
                             std::abs(tor_mag * norm(truth.r) - norm(truth.t)) / norm(truth.t));
    }
    CHECK(worst_orth < 1e-12);
    CHECK(worst_mag < 1e-12);
}

TEST_CASE("simulate: identical config and seed give identical output") {
    SceneConfig config = cube_scene(CueMode::oracle, 20, 0.1);
    config.noise.enabled = true;
    config.noise.sigma_looming = 0.01;
    config.noise.sigma_omega = 0.01;
    config.seed = 7;

    const SimulationResult a = simulate(config);
    const SimulationResult b = simulate(config);
    CHECK(same_cues(a.cues, b.cues));

    // and independent of the thread budget
    setenv("OWL_THREADS", "4", 1);
    const SimulationResult threaded = simulate(config);
    unsetenv("OWL_THREADS");
    CHECK(same_cues(a.cues, threaded.cues));
}

TEST_CASE("simulate: flow mode with camera rotation matches the oracle at dt = 1e-4") {
    SceneConfig config = cube_scene(CueMode::flow, 3, 1e-4);
    config.rotation_profile = {{0.0, {0, 0, 0.3}}};

    SceneConfig oracle_config = config;
    oracle_config.mode = CueMode::oracle;

    const SimulationResult flow = simulate(config);
    const SimulationResult oracle = simulate(oracle_config);
    REQUIRE(flow.cues.size() == 8);   // interior frame only

    for (const CueRecord& rec : flow.cues) {
        const auto it =
            std::find_if(oracle.cues.begin(), oracle.cues.end(), [&](const CueRecord& o) {
                return o.frame == rec.frame && o.sample.point_id == rec.sample.point_id;
            });
        REQUIRE(it != oracle.cues.end());
        CHECK(std::abs(rec.sample.looming - it->sample.looming) < 1e-6);
        CHECK(max_component_diff(rec.sample.omega, it->sample.omega) < 1e-6);
    }
}

TEST_CASE("simulate: flow-mode cues converge to oracle cues at second order") {
    auto worst_error_at = [](double dt) {
        SceneConfig flow_config = cube_scene(CueMode::flow, 3, dt);
        SceneConfig oracle_config = flow_config;
        oracle_config.mode = CueMode::oracle;
        const SimulationResult flow = simulate(flow_config);
        const SimulationResult oracle = simulate(oracle_config);
        double worst = 0.0;
        for (const CueRecord& rec : flow.cues) {
            const auto it =
                std::find_if(oracle.cues.begin(), oracle.cues.end(), [&](const CueRecord& o) {
                    return o.frame == rec.frame && o.sample.point_id == rec.sample.point_id;
                });
            worst = std::max({worst, std::abs(rec.sample.looming - it->sample.looming),
                              max_component_diff(rec.sample.omega, it->sample.omega)});
        }
        return worst;
    };
    const double e1 = worst_error_at(0.08);
    const double e2 = worst_error_at(0.04);
    const double e3 = worst_error_at(0.02);
    CHECK(e1 / e2 == Catch::Approx(4.0).epsilon(0.2));
    CHECK(e2 / e3 == Catch::Approx(4.0).epsilon(0.2));
}

TEST_CASE("simulate: frame collapse, moving point equals counter-moving camera") {
    SceneConfig a;
    ObjectSpec pa;
    pa.kind = ObjectKind::point_list;
    pa.points = {{0, 0, 0}};
    pa.position = {6, 0, 2};
    pa.velocity = {0, 1, 0};
    a.objects.push_back(pa);
    a.camera = static_camera(2.0);
    a.dt = 0.1;
    a.n_frames = 20;
    a.mode = CueMode::oracle;

    SceneConfig b = a;
    b.objects[0].velocity = {0, 0, 0};
    b.camera = TrajectorySpec{};
    b.camera.kind = TrajectoryKind::rectilinear;
    b.camera.position = {0, 0, 0};
    b.camera.velocity = {0, -1, 0};

    const SimulationResult ra = simulate(a);
    const SimulationResult rb = simulate(b);
    REQUIRE(ra.cues.size() == rb.cues.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < ra.cues.size(); ++i) {
        worst = std::max({worst,
                          std::abs(ra.cues[i].sample.looming - rb.cues[i].sample.looming),
                          max_component_diff(ra.cues[i].sample.omega, rb.cues[i].sample.omega),
                          max_component_diff(ra.cues[i].sample.e_r, rb.cues[i].sample.e_r)});
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("simulate: noise statistics match the configured sigma") {
    SceneConfig clean;
    ObjectSpec grid;
    grid.kind = ObjectKind::grid;
    grid.nu = 10;
    grid.nv = 10;
    grid.spacing = 0.5;
    grid.position = {0, 0, -10};
    clean.objects.push_back(grid);
    clean.camera.kind = TrajectoryKind::rectilinear;
    clean.camera.position = {0, 0, 0};
    clean.camera.velocity = {0.3, 0.1, -0.5};
    clean.dt = 0.05;
    clean.n_frames = 150;
    clean.mode = CueMode::oracle;

    SceneConfig noisy = clean;
    noisy.noise.enabled = true;
    noisy.noise.sigma_looming = 0.05;
    noisy.noise.sigma_omega = 0.02;
    noisy.seed = 99;

    const SimulationResult base = simulate(clean);
    const SimulationResult jittered = simulate(noisy);
    REQUIRE(base.cues.size() == jittered.cues.size());
    REQUIRE(base.cues.size() >= 10000);

    double sum = 0.0, sum2 = 0.0, sum_w = 0.0, sum2_w = 0.0;
    for (std::size_t i = 0; i < base.cues.size(); ++i) {
        const double dl = jittered.cues[i].sample.looming - base.cues[i].sample.looming;
        sum += dl;
        sum2 += dl * dl;
        const double dw = jittered.cues[i].sample.omega.x - base.cues[i].sample.omega.x;
        sum_w += dw;
        sum2_w += dw * dw;
    }
    const double n = static_cast<double>(base.cues.size());
    const double std_l = std::sqrt(sum2 / n - (sum / n) * (sum / n));
    const double std_w = std::sqrt(sum2_w / n - (sum_w / n) * (sum_w / n));
    CHECK(std_l == Catch::Approx(0.05).epsilon(0.05));
    CHECK(std_w == Catch::Approx(0.02).epsilon(0.05));
}

TEST_CASE("simulate: polar crossings are flagged, not fabricated") {
    SceneConfig config;
    ObjectSpec list;
    list.kind = ObjectKind::point_list;
    list.points = {{0, 0, 0}};
    list.position = {0, 0, 5};   // straight up the camera pole
    config.objects.push_back(list);
    config.camera = static_camera(0.2);
    config.dt = 0.1;
    config.n_frames = 3;
    config.mode = CueMode::flow;

    const SimulationResult result = simulate(config);
    CHECK(result.cues.empty());
    REQUIRE_FALSE(result.skipped.empty());
    bool saw_polar = false;
    for (const auto& skip : result.skipped)
        if (skip.reason.find("polar") != std::string::npos) saw_polar = true;
    CHECK(saw_polar);
}

TEST_CASE("simulate: camera driving through a point flags RangeTooSmall") {
    SceneConfig config;
    ObjectSpec list;
    list.kind = ObjectKind::point_list;
    list.points = {{0, 0, 0}};
    list.position = {1, 0, 0};
    config.objects.push_back(list);
    config.camera.kind = TrajectoryKind::rectilinear;
    config.camera.velocity = {1, 0, 0};
    config.dt = 1.0;
    config.n_frames = 3;   // camera sits on the point at t = 1
    config.mode = CueMode::oracle;

    const SimulationResult result = simulate(config);
    CHECK(result.cues.size() == 2);
    REQUIRE(result.skipped.size() == 1);
    CHECK(result.skipped[0].frame == 1);
}

TEST_CASE("validate_scene rejects bad configs with field-named messages") {
    SceneConfig config = cube_scene(CueMode::oracle, 10, 0.1);

    SceneConfig bad_dt = config;
    bad_dt.dt = 0.0;
    CHECK_THROWS_WITH(validate_scene(bad_dt), Catch::Matchers::ContainsSubstring("dt"));

    SceneConfig bad_flow = cube_scene(CueMode::flow, 2, 0.1);
    CHECK_THROWS_WITH(validate_scene(bad_flow), Catch::Matchers::ContainsSubstring("n_frames"));

    SceneConfig bad_cube = config;
    bad_cube.objects[0].samples_per_edge = 1;
    CHECK_THROWS_WITH(validate_scene(bad_cube),
                      Catch::Matchers::ContainsSubstring("samples_per_edge"));

    SceneConfig bad_velocity = config;
    bad_velocity.camera.velocity = {0, 0, 0};
    CHECK_THROWS_WITH(validate_scene(bad_velocity),
                      Catch::Matchers::ContainsSubstring("velocity"));

    SceneConfig bad_poly = config;
    bad_poly.camera.kind = TrajectoryKind::polyline;
    bad_poly.camera.waypoints = {{0.0, {0, 0, 0}}, {0.5, {1, 0, 0}}};   // horizon is 0.9
    CHECK_THROWS_WITH(validate_scene(bad_poly),
                      Catch::Matchers::ContainsSubstring("waypoints"));

    SceneConfig bad_noise = config;
    bad_noise.noise.sigma_looming = -1.0;
    CHECK_THROWS_WITH(validate_scene(bad_noise),
                      Catch::Matchers::ContainsSubstring("sigma_L"));
}
