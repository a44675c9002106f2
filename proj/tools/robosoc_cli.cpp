// Command-line harness: run matches, tournaments, replay logs and fit
// calibrations. Exit codes: 0 success, 1 configuration error, 2 runtime
// contract violation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "robosoc/robosoc.hpp"

namespace {

using namespace robosoc;

ControllerKind parse_controller(const std::string& s) {
    if (s == "proposed") return ControllerKind::proposed;
    if (s == "baseline") return ControllerKind::baseline;
    throw config_error("controller must be 'proposed' or 'baseline', got '" + s + "'");
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write " + path.string());
    out << content;
}

void write_outputs(const std::filesystem::path& dir, const std::string& stem,
                   const MatchResult& result, const FieldSpec& field) {
    std::filesystem::create_directories(dir);
    write_file(dir / (stem + ".csv"), result.log.to_string());
    std::ofstream svg(dir / (stem + ".svg"));
    write_trajectory_svg(svg, result.log, field);
}

int cmd_run(const std::string& config_path, std::uint64_t seed, bool seed_set,
            const std::string& out_dir, const std::string& ctrl_a, const std::string& ctrl_b) {
    ScenarioConfig cfg;
    if (!config_path.empty()) cfg = load_scenario(config_path);
    if (seed_set) cfg.seed = seed;
    if (!ctrl_a.empty()) cfg.team_a.controller = parse_controller(ctrl_a);
    if (!ctrl_b.empty()) cfg.team_b.controller = parse_controller(ctrl_b);

    const MatchResult result = run_match(cfg);
    std::printf("match finished: A(%s) %d - %d B(%s)\n",
                controller_name(cfg.team_a.controller), result.goals_a, result.goals_b,
                controller_name(cfg.team_b.controller));
    std::printf("kicks A=%d B=%d, shot attempts A=%d B=%d, mean tick %.3f ms\n", result.kicks_a,
                result.kicks_b, result.shot_attempts_a, result.shot_attempts_b,
                result.mean_tick_ms);
    if (!out_dir.empty()) {
        write_outputs(out_dir, "match", result, cfg.field);
        std::printf("wrote %s/match.csv and match.svg\n", out_dir.c_str());
    }
    return 0;
}

int cmd_tournament(const std::string& config_path, std::uint64_t seed, bool seed_set, int rounds,
                   const std::string& out_dir) {
    ScenarioConfig cfg;
    if (!config_path.empty()) cfg = load_scenario(config_path);
    if (seed_set) cfg.seed = seed;

    const std::vector<ScenarioConfig> pairings{cfg};
    const TournamentReport report = run_round_robin(pairings, rounds);
    std::fputs(report.table_text(pairings).c_str(), stdout);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        for (const auto& r : report.rounds) {
            write_outputs(out_dir, "round" + std::to_string(r.round + 1), r.match, cfg.field);
        }
        write_file(std::filesystem::path(out_dir) / "table.txt", report.table_text(pairings));
        std::printf("wrote per-round logs and table.txt to %s\n", out_dir.c_str());
    }
    return 0;
}

int cmd_replay(const std::string& log_path, const std::string& plot_path) {
    std::ifstream in(log_path);
    if (!in) throw config_error("cannot open log: " + log_path);
    const TrajectoryLog log = TrajectoryLog::parse(in);
    const LogVerification v = verify_log(log);
    std::printf("log: %ld ticks, teams A=%s B=%s\n", v.ticks, log.controller_a.c_str(),
                log.controller_b.c_str());
    std::printf("recounted goals: A=%d B=%d (final line: A=%d B=%d)\n", v.goals_a, v.goals_b,
                log.final_a, log.final_b);
    if (!v.ok) {
        for (const auto& p : v.problems) std::fprintf(stderr, "inconsistency: %s\n", p.c_str());
        throw contract_error("log verification failed");
    }
    std::puts("log verified: consistent");
    if (!plot_path.empty()) {
        // Field extents are not stored in the log; infer from the trajectories.
        FieldSpec field;
        double max_x = 0.0, max_y = 0.0;
        for (const auto& r : log.rows) {
            for (const auto& p : r.robots) {
                max_x = std::max(max_x, p.position.x);
                max_y = std::max(max_y, p.position.y);
            }
        }
        if (max_x > 0.0) field.length = max_x + 100.0;
        if (max_y > 0.0) field.width = max_y + 100.0;
        std::ofstream svg(plot_path);
        if (!svg) throw config_error("cannot write " + plot_path);
        write_trajectory_svg(svg, log, field);
        std::printf("wrote %s\n", plot_path.c_str());
    }
    return 0;
}

int cmd_calibrate(const std::string& points_path) {
    std::ifstream in(points_path);
    if (!in) throw config_error("cannot open points file: " + points_path);
    const auto points = load_correspondences(in);
    const CalibrationMap cal = fit_calibration(points);
    std::printf("fitted bilinear map from %zu correspondences\n", points.size());
    std::printf("x = %+.9g %+.9g*u %+.9g*v %+.9g*u*v\n", cal.a[0], cal.a[1], cal.a[2], cal.a[3]);
    std::printf("y = %+.9g %+.9g*u %+.9g*v %+.9g*u*v\n", cal.b[0], cal.b[1], cal.b[2], cal.b[3]);
    std::printf("rms residual: %.6g mm\n", cal.rms_residual);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"robosoc: deterministic 2-D robot soccer simulator and controller harness"};
    app.require_subcommand(1);

    std::string config_path, out_dir, ctrl_a, ctrl_b, log_path, plot_path, points_path;
    std::uint64_t seed = 0;
    int rounds = 4;

    auto* run = app.add_subcommand("run", "run one match");
    run->add_option("--config", config_path, "scenario JSON file");
    auto* run_seed = run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--out", out_dir, "directory for match.csv and match.svg");
    run->add_option("--controller-a", ctrl_a, "team A controller: proposed|baseline");
    run->add_option("--controller-b", ctrl_b, "team B controller: proposed|baseline");

    auto* tour = app.add_subcommand("tournament", "proposed vs baseline over several rounds");
    tour->add_option("--rounds", rounds, "number of rounds")->check(CLI::PositiveNumber);
    tour->add_option("--config", config_path, "scenario JSON file");
    auto* tour_seed = tour->add_option("--seed", seed, "override the scenario seed");
    tour->add_option("--out", out_dir, "directory for per-round logs");

    auto* replay = app.add_subcommand("replay", "verify a trajectory log and plot it");
    replay->add_option("--log", log_path, "trajectory CSV")->required();
    replay->add_option("--plot", plot_path, "write an SVG of the trajectories");

    auto* calibrate = app.add_subcommand("calibrate", "fit the pixel-to-world map");
    calibrate->add_option("--points", points_path, "correspondence file: u v x y per line")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(config_path, seed, run_seed->count() > 0, out_dir, ctrl_a, ctrl_b);
        }
        if (tour->parsed()) {
            return cmd_tournament(config_path, seed, tour_seed->count() > 0, rounds, out_dir);
        }
        if (replay->parsed()) {
            return cmd_replay(log_path, plot_path);
        }
        if (calibrate->parsed()) {
            return cmd_calibrate(points_path);
        }
    } catch (const robosoc::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const robosoc::calibration_error& e) {
        std::fprintf(stderr, "calibration error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
