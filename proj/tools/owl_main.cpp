// Command-line front end: scene simulation, scaled reconstruction, heading
// recovery, trajectory mapping, iso-surface sampling, and the self-check
// suite. Exit codes: 0 success, 2 usage/config/data error, 3 I/O error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "owl/io.hpp"
#include "owl/owl.hpp"

namespace fs = std::filesystem;
using owl::io::json;

namespace {

json manifest_base(const char* command) {
    return json{{"tool", "owl"}, {"version", owl::kVersion}, {"command", command}};
}

void write_json_file(const fs::path& path, const json& value) {
    owl::io::write_text(path, value.dump(2) + "\n");
}

fs::path ensure_dir(const std::string& dir) {
    fs::path path(dir);
    std::error_code ec;
    fs::create_directories(path, ec);
    if (ec) throw owl::IoError("cannot create directory " + dir + ": " + ec.message());
    return path;
}

std::map<int, std::vector<owl::CueSample>> rows_by_frame(const std::vector<owl::CueRecord>& rows) {
    std::map<int, std::vector<owl::CueSample>> frames;
    for (const owl::CueRecord& row : rows) frames[row.frame].push_back(row.sample);
    for (auto& [frame, samples] : frames)
        std::sort(samples.begin(), samples.end(),
                  [](const owl::CueSample& a, const owl::CueSample& b) {
                      return a.point_id < b.point_id;
                  });
    return frames;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int run_simulate(const std::string& config_path, const std::string& out_dir) {
    const json config_json = owl::io::load_json(config_path);
    const owl::SceneConfig config = owl::io::scene_config_from_json(config_json);
    const owl::SimulationResult result = owl::simulate(config);

    const fs::path dir = ensure_dir(out_dir);
    owl::io::write_cues_csv(dir / "cues.csv", result.cues);
    owl::io::write_truth_csv(dir / "truth.csv", result.truth);

    json skipped = json::array();
    for (const auto& skip : result.skipped)
        skipped.push_back({{"frame", skip.frame}, {"point_id", skip.point_id},
                           {"reason", skip.reason}});

    json manifest = manifest_base("simulate");
    manifest["config_digest"] = owl::io::config_digest(config_json);
    manifest["seed"] = config.seed;
    manifest["summary"] = {{"n_frames", config.n_frames},
                           {"n_cues", result.cues.size()},
                           {"n_skipped", result.skipped.size()},
                           {"mode", config.mode == owl::CueMode::oracle ? "oracle" : "flow"}};
    manifest["skipped"] = skipped;
    manifest["outputs"] = {"cues.csv", "truth.csv"};
    write_json_file(dir / "manifest.json", manifest);
    return 0;
}

// ---------------------------------------------------------------------------
// reconstruct
// ---------------------------------------------------------------------------

int run_reconstruct(const std::string& cues_path, const std::string& out_dir,
                    std::optional<double> speed, std::optional<int> frame, bool all) {
    if (frame.has_value() == all)
        throw owl::ConfigInvalid("reconstruct: pass exactly one of --frame or --all");
    const auto frames = rows_by_frame(owl::io::read_cues_csv(cues_path));

    std::vector<int> selected;
    if (all) {
        for (const auto& [k, samples] : frames) selected.push_back(k);
    } else {
        if (!frames.contains(*frame))
            throw owl::ConfigInvalid("--frame " + std::to_string(*frame) +
                                     ": not present in " + cues_path);
        selected.push_back(*frame);
    }

    const fs::path dir = ensure_dir(out_dir);
    json manifest = manifest_base("reconstruct");
    json rejects = json::array();
    json outputs = json::array();
    const double scale = speed.value_or(1.0);

    for (const int k : selected) {
        const auto& samples = frames.at(k);
        const owl::CloudResult result = owl::reconstruct_cloud(samples);
        std::vector<owl::Vec3> vertices;
        vertices.reserve(result.cloud.points.size());
        for (const owl::ScaledPoint& p : result.cloud.points) vertices.push_back(p.p * scale);
        const std::string name = "cloud_" + std::to_string(k) + ".ply";
        owl::io::write_ply(dir / name, vertices);
        outputs.push_back(name);
        if (!result.rejected_ids.empty())
            rejects.push_back({{"frame", k}, {"point_ids", result.rejected_ids}});
    }

    manifest["summary"] = {{"n_clouds", selected.size()},
                           {"units", speed ? "meters" : "seconds"}};
    if (speed) manifest["summary"]["speed"] = *speed;
    manifest["rejects"] = rejects;
    manifest["outputs"] = outputs;
    write_json_file(dir / "manifest.json", manifest);
    return 0;
}

// ---------------------------------------------------------------------------
// heading
// ---------------------------------------------------------------------------

int run_heading(const std::string& cues_path, int frame, const std::string& method,
                const std::string& out_path) {
    const auto frames = rows_by_frame(owl::io::read_cues_csv(cues_path));
    if (!frames.contains(frame))
        throw owl::ConfigInvalid("--frame " + std::to_string(frame) + ": not present in " +
                                 cues_path);
    const auto& samples = frames.at(frame);

    owl::HeadingEstimate estimate;
    if (method == "cones") {
        std::vector<owl::ConeConstraint> constraints;
        constraints.reserve(samples.size());
        for (const owl::CueSample& s : samples)
            constraints.push_back({s.e_r, owl::alpha_from_cues(s.looming, s.omega)});
        estimate = owl::heading_cones(constraints);
    } else {
        if (samples.empty()) throw owl::InsufficientPoints("heading: frame has no points");
        owl::Vec3 mean;
        std::vector<owl::Vec3> headings;
        for (const owl::CueSample& s : samples) {
            headings.push_back(owl::heading_per_point(s.looming, s.omega, s.e_r));
            mean += headings.back();
        }
        if (owl::norm(mean) <= 1e-12)
            throw owl::DegenerateGeometry("heading: per-point headings cancel out");
        const owl::Vec3 t_hat = mean / owl::norm(mean);
        double sq_sum = 0.0;   // angular dispersion about the mean
        for (const owl::Vec3& h : headings) {
            const double a = std::atan2(owl::norm(owl::cross(h, t_hat)), owl::dot(h, t_hat));
            sq_sum += a * a;
        }
        estimate = {t_hat, std::sqrt(sq_sum / static_cast<double>(headings.size())),
                    static_cast<int>(headings.size())};
    }

    write_json_file(out_path, json{{"t_hat", {estimate.t_hat.x, estimate.t_hat.y,
                                              estimate.t_hat.z}},
                                   {"residual_rms", estimate.residual_rms},
                                   {"n_points", estimate.n_points},
                                   {"method", method}});
    return 0;
}

// ---------------------------------------------------------------------------
// owlmap
// ---------------------------------------------------------------------------

int run_owlmap(const std::string& config_path, const std::string& out_path) {
    const json config_json = owl::io::load_json(config_path);
    const owl::io::OwlMapConfig config = owl::io::owlmap_config_from_json(config_json);

    const fs::path out(out_path);
    for (std::size_t i = 0; i < config.tracks.size(); ++i) {
        const owl::Track track = owl::io::track_from_trajectory(
            config.tracks[i], config.dt, config.n_samples, static_cast<int>(i));
        const auto samples = owl::owl_trajectory(track, config.plane_normal);
        fs::path path = out;
        if (config.tracks.size() > 1) {
            path = out.parent_path() /
                   (out.stem().string() + "_t" + std::to_string(i) + out.extension().string());
        }
        owl::io::write_owl_traj_csv(path, samples);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// iso
// ---------------------------------------------------------------------------

int run_iso(const std::string& kind, double t_mag, double level, int n_samples,
            const std::string& out_path) {
    std::vector<owl::Vec3> points;
    double max_deviation = 0.0;
    if (kind == "sphere") {
        points = owl::iso_looming_sphere(t_mag, level, n_samples);
        for (const owl::Vec3& p : points)
            max_deviation = std::max(
                max_deviation, std::abs(owl::cues_oracle({t_mag, 0, 0}, p).looming - level));
    } else {
        points = owl::iso_omega_torus(t_mag, level, n_samples);
        for (const owl::Vec3& p : points)
            max_deviation = std::max(
                max_deviation,
                std::abs(owl::norm(owl::cues_oracle({t_mag, 0, 0}, p).omega) - level));
    }

    const fs::path out(out_path);
    owl::io::write_ply(out, points);

    json manifest = manifest_base("iso");
    manifest["summary"] = {{"kind", kind}, {"t_mag", t_mag}, {"level", level},
                           {"n_samples", n_samples}, {"n_points", points.size()},
                           {"self_oracle_max_deviation", max_deviation}};
    manifest["outputs"] = {out.filename().string()};
    const fs::path dir = out.parent_path().empty() ? fs::path(".") : out.parent_path();
    write_json_file(dir / "manifest.json", manifest);
    return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct Check {
    std::string name;
    double measured;
    double threshold;
    bool passed() const { return measured < threshold; }
};

// atan2 form stays well-conditioned for near-parallel unit vectors.
double angle_between_units(const owl::Vec3& a, const owl::Vec3& b) {
    return std::atan2(owl::norm(owl::cross(a, b)), owl::dot(a, b));
}

int run_verify(const std::string& config_path, const std::string& out_path) {
    const json config_json = owl::io::load_json(config_path);
    const owl::SceneConfig config = owl::io::scene_config_from_json(config_json);
    constexpr double pi = std::numbers::pi;

    std::vector<Check> checks;
    std::mt19937_64 rng(0xC0FFEE ^ config.seed);
    auto uniform = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    auto random_dir = [&]() {
        std::normal_distribution<double> n(0.0, 1.0);
        owl::Vec3 v{n(rng), n(rng), n(rng)};
        while (owl::norm(v) < 1e-6) v = {n(rng), n(rng), n(rng)};
        return v / owl::norm(v);
    };
    auto quat_diff = [](const owl::Quaternion& a, const owl::Quaternion& b) {
        return std::max({std::abs(a.w - b.w), std::abs(a.v.x - b.v.x),
                         std::abs(a.v.y - b.v.y), std::abs(a.v.z - b.v.z)});
    };

    // ToR equivalence and reciprocal identity over one seeded sweep.
    {
        double worst_equiv = 0.0, worst_recip = 0.0;
        for (int n = 0; n < 100000; ++n) {
            const owl::Vec3 t = {uniform(-5, 5), uniform(-5, 5), uniform(-5, 5)};
            const owl::Vec3 r = random_dir() * uniform(0.5, 50.0);
            const owl::Cues cues = owl::cues_oracle(t, r);
            const owl::ToR tor = owl::tor_from_vectors(t, r);
            worst_equiv = std::max(
                worst_equiv, quat_diff(tor.q, owl::tor_from_cues(cues.looming, cues.omega).q));
            if (tor.magnitude() > 1e-6)
                worst_recip = std::max(
                    worst_recip, quat_diff(owl::quat_mul(tor.q, owl::rot_from_tor(tor).q),
                                           owl::Quaternion::identity()));
        }
        checks.push_back({"tor_equivalence", worst_equiv, 1e-12});
        checks.push_back({"reciprocal_identity", worst_recip, 1e-12});
    }

    // Planar de-rotation invariant, closed form.
    {
        double worst = 0.0;
        for (int n = 0; n < 10000; ++n) {
            const double angle = uniform(-pi, pi);
            const owl::Vec3 r =
                owl::Vec3{std::cos(angle), std::sin(angle), 0.0} * uniform(0.5, 20.0);
            const owl::Vec3 t{uniform(-5, 5), uniform(-5, 5), 0.0};
            const owl::Vec3 omega_cam{0.0, 0.0, uniform(-2, 2)};
            const owl::FlowRates rates =
                owl::flow_rates(r, owl::motion_field(t, omega_cam, r));
            const owl::Vec3 omega = owl::derotate(rates, owl::bearing_of(r), omega_cam);
            const double omega_2d = owl::omega_scalar_2d(omega, {0, 0, 1});
            worst = std::max(worst, std::abs(omega_2d + omega_cam.z + rates.theta_dot));
        }
        checks.push_back({"derotation_invariant", worst, 1e-12});
    }

    // Scene-based checks: heading exactness and shape constancy.
    const owl::SimulationResult result = owl::simulate(config);
    {
        std::map<std::pair<int, int>, owl::Vec3> truth_t;
        for (const owl::TruthRecord& rec : result.truth)
            truth_t[{rec.frame, rec.point_id}] = rec.t;

        std::vector<double> errors;
        for (const owl::CueRecord& rec : result.cues) {
            const owl::Vec3& t = truth_t.at({rec.frame, rec.sample.point_id});
            if (owl::norm(t) < 1e-12) continue;
            const owl::Vec3 heading = owl::heading_per_point(
                rec.sample.looming, rec.sample.omega, rec.sample.e_r);
            errors.push_back(angle_between_units(heading, t / owl::norm(t)));
        }
        double measured = 0.0;
        double threshold = 1e-9;
        if (config.noise.enabled) {
            std::nth_element(errors.begin(), errors.begin() + errors.size() / 2, errors.end());
            measured = errors.empty() ? 0.0 : errors[errors.size() / 2];
            threshold = 2.0 * pi / 180.0;   // median budget under cue noise
        } else if (config.mode == owl::CueMode::flow) {
            for (const double e : errors) measured = std::max(measured, e);
            threshold = 1e-2;   // finite-difference budget
        } else {
            for (const double e : errors) measured = std::max(measured, e);
        }
        checks.push_back({"heading_exactness", measured, threshold});
    }
    {
        std::vector<owl::ReconstructedCloud> clouds;
        double noise_budget_sum = 0.0;
        std::size_t noise_budget_count = 0;
        std::map<int, std::vector<owl::CueSample>> frames;
        for (const owl::CueRecord& rec : result.cues) frames[rec.frame].push_back(rec.sample);
        for (const auto& [frame, samples] : frames) {
            if (samples.size() < 3) continue;
            owl::CloudResult cloud = owl::reconstruct_cloud(samples);
            cloud.cloud.time = samples.front().time;
            clouds.push_back(std::move(cloud.cloud));
            for (const owl::CueSample& s : samples) {
                const double mag2 = s.looming * s.looming + owl::norm2(s.omega);
                if (mag2 > 0) {
                    noise_budget_sum += 1.0 / (mag2 * mag2);
                    ++noise_budget_count;
                }
            }
        }
        const bool allow_scale = config.camera.kind == owl::TrajectoryKind::constant_accel ||
                                 config.camera.kind == owl::TrajectoryKind::polyline;
        const double score = owl::constancy_score(clouds, allow_scale);
        double threshold = config.mode == owl::CueMode::oracle ? 1e-9 : 1e-2;
        if (config.noise.enabled && noise_budget_count > 0) {
            // positional error per point ~ sigma / |ToR|^2; six-sigma budget
            const double sigma = std::hypot(config.noise.sigma_looming,
                                            config.noise.sigma_omega);
            const double rms_scale =
                std::sqrt(noise_budget_sum / static_cast<double>(noise_budget_count));
            threshold += 6.0 * std::numbers::sqrt2 * sigma * rms_scale /
                         owl::cloud_diameter(clouds.front());
        }
        checks.push_back({"constancy_score", score, threshold});
    }

    // Conformal residual: seeded lines mapped through the inversion.
    {
        double worst = 0.0;
        for (int line = 0; line < 100; ++line) {
            const double beta = uniform(-pi, pi);
            const double distance = uniform(0.1, 3.0);
            const owl::ComplexVal anchor = std::polar(distance, beta);
            const owl::ComplexVal direction{-std::sin(beta), std::cos(beta)};
            std::vector<owl::ComplexVal> mapped;
            for (int i = 0; i < 64; ++i) {
                const double s = -2.0 + 4.0 * i / 63.0;
                mapped.push_back(1.0 / (anchor + direction * s));
            }
            worst = std::max(worst, owl::circle_through_origin_residual(mapped));
        }
        checks.push_back({"conformal_residual", worst, 1e-9});
    }

    bool all_passed = true;
    json check_list = json::array();
    for (const Check& check : checks) {
        all_passed = all_passed && check.passed();
        check_list.push_back({{"name", check.name}, {"measured", check.measured},
                              {"threshold", check.threshold}, {"pass", check.passed()}});
        std::cout << (check.passed() ? "PASS" : "FAIL") << "  " << check.name
                  << "  measured=" << owl::io::format_double(check.measured)
                  << " threshold=" << owl::io::format_double(check.threshold) << "\n";
    }

    json report = manifest_base("verify");
    report["config_digest"] = owl::io::config_digest(config_json);
    report["seed"] = config.seed;
    report["checks"] = check_list;
    report["all_passed"] = all_passed;
    write_json_file(out_path, report);
    return all_passed ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"visual-motion cue calculus: simulation, scaled reconstruction, heading"};
    app.set_version_flag("--version", owl::kVersion);
    app.require_subcommand(1);

    std::string config_path, out_dir, cues_path, out_path;

    CLI::App* simulate = app.add_subcommand("simulate", "run a scene and emit per-point cues");
    simulate->add_option("config", config_path, "scene config JSON")->required();
    simulate->add_option("out_dir", out_dir, "output directory")->required();

    CLI::App* reconstruct =
        app.add_subcommand("reconstruct", "turn cue rows into scaled PLY clouds");
    std::optional<double> speed;
    std::optional<int> frame_opt;
    bool all_frames = false;
    reconstruct->add_option("cues", cues_path, "cues.csv from simulate")->required();
    reconstruct->add_option("out_dir", out_dir, "output directory")->required();
    reconstruct->add_option("--speed", speed,
                            "known relative speed [m/s]; converts seconds to meters");
    reconstruct->add_option("--frame", frame_opt, "frame index to reconstruct");
    reconstruct->add_flag("--all", all_frames, "reconstruct every frame");

    CLI::App* heading = app.add_subcommand("heading", "recover the relative heading direction");
    int heading_frame = 0;
    std::string method{"cones"};
    std::string heading_out{"heading.json"};
    heading->add_option("cues", cues_path, "cues.csv from simulate")->required();
    heading->add_option("--frame", heading_frame, "frame index")->required();
    heading->add_option("--method", method, "estimator")
        ->check(CLI::IsMember({"cones", "per-point"}));
    heading->add_option("--out", heading_out, "output JSON path");

    CLI::App* owlmap = app.add_subcommand("owlmap", "map planar tracks into the display plane");
    owlmap->add_option("config", config_path, "track config JSON")->required();
    owlmap->add_option("out", out_path, "output CSV path")->required();

    CLI::App* iso = app.add_subcommand("iso", "sample an iso-looming sphere or iso-omega torus");
    std::string kind;
    double t_mag = 1.0, level = 1.0;
    int samples = 32;
    iso->add_option("--kind", kind, "surface kind")
        ->required()
        ->check(CLI::IsMember({"sphere", "torus"}));
    iso->add_option("--t-mag", t_mag, "relative speed magnitude [m/s]")->required();
    iso->add_option("--level", level, "cue level: looming [1/s] or |omega| [rad/s]")->required();
    iso->add_option("--samples", samples, "stations per parameter direction");
    iso->add_option("out", out_path, "output PLY path")->required();

    CLI::App* verify = app.add_subcommand("verify", "run the bundled invariant checks");
    std::string verify_out{"verify.json"};
    verify->add_option("config", config_path, "scene config JSON")->required();
    verify->add_option("--out", verify_out, "report path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (simulate->parsed()) return run_simulate(config_path, out_dir);
        if (reconstruct->parsed())
            return run_reconstruct(cues_path, out_dir, speed, frame_opt, all_frames);
        if (heading->parsed()) return run_heading(cues_path, heading_frame, method, heading_out);
        if (owlmap->parsed()) return run_owlmap(config_path, out_path);
        if (iso->parsed()) return run_iso(kind, t_mag, level, samples, out_path);
        if (verify->parsed()) return run_verify(config_path, verify_out);
    } catch (const owl::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const owl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
