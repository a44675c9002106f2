#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "robosoc/control.hpp"
#include "robosoc/errors.hpp"
#include "robosoc/geometry.hpp"
#include "robosoc/shoot.hpp"
#include "robosoc/tracker.hpp"
#include "robosoc/trajectory_log.hpp"
#include "robosoc/vision.hpp"
#include "robosoc/world.hpp"

// Match harness: scenario configuration, the 35 ms loop wiring
// vision -> tracker -> controllers -> world, opponent policies, metrics and
// the tournament runner. Deterministic given (config, seed).

namespace robosoc {

enum class ControllerKind { proposed, baseline };

inline const char* controller_name(ControllerKind k) {
    return k == ControllerKind::proposed ? "proposed" : "baseline";
}

struct TeamConfig {
    ControllerKind controller = ControllerKind::proposed;
    int robots = 3;                // keeper first, then field robots
    std::vector<Pose> start_poses; // optional; default formation when empty
};

struct VisionConfig {
    int width = 620;
    int height = 480;
    double margin_px = 10.0; // field-to-frame border
    int ball_radius_px = 6;
    double noise_rate = 0.0005;
};

struct ScenarioConfig {
    std::uint64_t seed = 1;
    double duration_s = 300.0;
    double tick_s = 0.035;
    FieldSpec field;
    PhysicsParams physics;
    double wheel_base = 10.0;
    double half_size = 37.5;
    ControlGains gains; // gains.v_max mirrors physics.v_max
    FilterParams filter;
    GhMode filter_mode = GhMode::standard;
    int max_coast = 15;
    VisionConfig vision;
    ShootConfig shoot;
    TeamConfig team_a{ControllerKind::proposed};
    TeamConfig team_b{ControllerKind::baseline};
    std::string fuzzy_table_path; // empty: built-in table
    double start_jitter_pos = 30.0;
    double start_jitter_deg = 10.0;
};

/// Every violated field, or empty when the config is usable.
inline std::vector<std::string> validate(const ScenarioConfig& c) {
    std::vector<std::string> bad;
    const auto need = [&](bool ok, const std::string& what) {
        if (!ok) bad.push_back(what);
    };
    need(c.duration_s > 0.0, "duration_s must be > 0");
    need(c.tick_s > 0.0, "tick_s must be > 0");
    need(c.field.length > 0.0, "field.length_mm must be > 0");
    need(c.field.width > 0.0, "field.width_mm must be > 0");
    need(c.field.goal_width > 0.0 && c.field.goal_width < c.field.width,
         "field.goal_width_mm must be in (0, width)");
    need(c.physics.v_max > 0.0, "physics.v_max_mm_s must be > 0");
    need(c.physics.ball_v_max > 0.0, "physics.ball_v_max_mm_s must be > 0");
    need(c.physics.ball_radius > 0.0, "physics.ball_radius_mm must be > 0");
    need(c.physics.friction >= 0.0, "physics.friction_per_s must be >= 0");
    need(c.physics.restitution >= 0.0 && c.physics.restitution <= 1.0,
         "physics.restitution must be in [0, 1]");
    need(c.physics.kick_gain > 0.0, "physics.kick_gain must be > 0");
    need(c.physics.substeps >= 1, "physics.substeps must be >= 1");
    need(c.wheel_base > 0.0, "robot.wheel_base_mm must be > 0");
    need(c.half_size > 0.0, "robot.half_size_mm must be > 0");
    need(c.gains.valid(), "gains must all be > 0");
    need(c.filter.valid(), "filter params outside the g-h stability region");
    need(c.max_coast >= 0, "filter.max_coast must be >= 0");
    need(c.vision.width > 0 && c.vision.height > 0, "vision resolution must be positive");
    need(c.vision.margin_px >= 0.0, "vision.margin_px must be >= 0");
    need(c.vision.ball_radius_px >= 1, "vision.ball_radius_px must be >= 1");
    need(c.vision.noise_rate >= 0.0 && c.vision.noise_rate < 1.0,
         "vision.noise_rate must be in [0, 1)");
    need(c.shoot.near_threshold > 0.0, "shoot.near_threshold_mm must be > 0");
    need(c.shoot.lateral_tol > 0.0, "shoot.lateral_tol_mm must be > 0");
    need(c.shoot.align_tol_deg > 0.0, "shoot.align_tol_deg must be > 0");
    need(c.shoot.dash_steps >= 1, "shoot.dash_steps must be >= 1");
    need(c.shoot.standoff > 0.0, "shoot.standoff_mm must be > 0");
    need(c.shoot.revert_radius > 0.0, "shoot.revert_radius_mm must be > 0");
    need(c.shoot.k_lead_fixed >= 0, "shoot.k_lead must be >= 0");
    need(c.shoot.k_lead_max >= 1, "shoot.k_lead_max must be >= 1");
    need(c.start_jitter_pos >= 0.0, "start_jitter.pos_mm must be >= 0");
    need(c.start_jitter_deg >= 0.0, "start_jitter.heading_deg must be >= 0");
    for (const auto* t : {&c.team_a, &c.team_b}) {
        const std::string name = (t == &c.team_a) ? "teams.a" : "teams.b";
        need(t->robots >= 1 && t->robots <= 5, name + ".robots must be in [1, 5]");
        if (!t->start_poses.empty()) {
            need(static_cast<int>(t->start_poses.size()) == t->robots,
                 name + ".start_poses must list one pose per robot");
            for (const auto& p : t->start_poses) {
                need(p.position.x >= 0.0 && p.position.x <= c.field.length &&
                         p.position.y >= 0.0 && p.position.y <= c.field.width,
                     name + ".start_poses must lie inside the field");
            }
        }
    }
    return bad;
}

inline void validate_or_throw(const ScenarioConfig& c) {
    const auto bad = validate(c);
    if (!bad.empty()) {
        std::string msg = "invalid scenario config:";
        for (const auto& b : bad) msg += "\n  - " + b;
        throw config_error(msg);
    }
}

// ---------------------------------------------------------------------------
// JSON scenario files. Unknown keys are errors.
// ---------------------------------------------------------------------------

namespace detail {

using json = nlohmann::json;

inline void check_keys(const json& j, const std::string& path,
                       std::initializer_list<const char*> allowed,
                       std::vector<std::string>& problems) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed) {
            if (item.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) problems.push_back("unknown key '" + path + item.key() + "'");
    }
}

template <typename T>
void get_to_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

} // namespace detail

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
    using detail::check_keys;
    using detail::get_to_if;
    std::vector<std::string> problems;
    ScenarioConfig c;

    check_keys(j, "",
               {"seed", "duration_s", "tick_s", "field", "robot", "physics", "gains", "filter",
                "vision", "shoot", "teams", "fuzzy_table", "start_jitter"},
               problems);
    if (!j.contains("seed")) {
        problems.push_back("missing mandatory key 'seed'");
    } else {
        j.at("seed").get_to(c.seed);
    }
    get_to_if(j, "duration_s", c.duration_s);
    get_to_if(j, "tick_s", c.tick_s);

    if (j.contains("field")) {
        const auto& f = j.at("field");
        check_keys(f, "field.", {"length_mm", "width_mm", "goal_width_mm"}, problems);
        get_to_if(f, "length_mm", c.field.length);
        get_to_if(f, "width_mm", c.field.width);
        get_to_if(f, "goal_width_mm", c.field.goal_width);
    }
    if (j.contains("robot")) {
        const auto& r = j.at("robot");
        check_keys(r, "robot.", {"half_size_mm", "wheel_base_mm"}, problems);
        get_to_if(r, "half_size_mm", c.half_size);
        get_to_if(r, "wheel_base_mm", c.wheel_base);
    }
    if (j.contains("physics")) {
        const auto& p = j.at("physics");
        check_keys(p, "physics.",
                   {"v_max_mm_s", "ball_v_max_mm_s", "ball_radius_mm", "friction_per_s",
                    "restitution", "kick_gain", "substeps"},
                   problems);
        get_to_if(p, "v_max_mm_s", c.physics.v_max);
        get_to_if(p, "ball_v_max_mm_s", c.physics.ball_v_max);
        get_to_if(p, "ball_radius_mm", c.physics.ball_radius);
        get_to_if(p, "friction_per_s", c.physics.friction);
        get_to_if(p, "restitution", c.physics.restitution);
        get_to_if(p, "kick_gain", c.physics.kick_gain);
        get_to_if(p, "substeps", c.physics.substeps);
    }
    if (j.contains("gains")) {
        const auto& g = j.at("gains");
        check_keys(g, "gains.", {"k_d", "k_a", "k_a_turn"}, problems);
        get_to_if(g, "k_d", c.gains.k_d);
        get_to_if(g, "k_a", c.gains.k_a);
        get_to_if(g, "k_a_turn", c.gains.k_a_turn);
    }
    if (j.contains("filter")) {
        const auto& f = j.at("filter");
        check_keys(f, "filter.", {"g", "h", "mode", "max_coast"}, problems);
        get_to_if(f, "g", c.filter.g);
        get_to_if(f, "h", c.filter.h);
        get_to_if(f, "max_coast", c.max_coast);
        if (f.contains("mode")) {
            const auto mode = f.at("mode").get<std::string>();
            if (mode == "standard") c.filter_mode = GhMode::standard;
            else if (mode == "as_printed") c.filter_mode = GhMode::as_printed;
            else problems.push_back("filter.mode must be 'standard' or 'as_printed'");
        }
    }
    if (j.contains("vision")) {
        const auto& v = j.at("vision");
        check_keys(v, "vision.",
                   {"width_px", "height_px", "margin_px", "ball_radius_px", "noise_rate"},
                   problems);
        get_to_if(v, "width_px", c.vision.width);
        get_to_if(v, "height_px", c.vision.height);
        get_to_if(v, "margin_px", c.vision.margin_px);
        get_to_if(v, "ball_radius_px", c.vision.ball_radius_px);
        get_to_if(v, "noise_rate", c.vision.noise_rate);
    }
    if (j.contains("shoot")) {
        const auto& s = j.at("shoot");
        check_keys(s, "shoot.",
                   {"near_threshold_mm", "lateral_tol_mm", "align_tol_deg", "dash_steps", "standoff_mm",
                    "revert_radius_mm", "aim_inset_mm", "k_lead", "k_lead_max"},
                   problems);
        get_to_if(s, "near_threshold_mm", c.shoot.near_threshold);
        get_to_if(s, "lateral_tol_mm", c.shoot.lateral_tol);
        get_to_if(s, "align_tol_deg", c.shoot.align_tol_deg);
        get_to_if(s, "dash_steps", c.shoot.dash_steps);
        get_to_if(s, "standoff_mm", c.shoot.standoff);
        get_to_if(s, "revert_radius_mm", c.shoot.revert_radius);
        get_to_if(s, "aim_inset_mm", c.shoot.aim_inset);
        get_to_if(s, "k_lead", c.shoot.k_lead_fixed);
        get_to_if(s, "k_lead_max", c.shoot.k_lead_max);
    }
    if (j.contains("teams")) {
        const auto& t = j.at("teams");
        check_keys(t, "teams.", {"a", "b"}, problems);
        const auto read_team = [&](const char* key, TeamConfig& out) {
            if (!t.contains(key)) return;
            const auto& tj = t.at(key);
            check_keys(tj, std::string("teams.") + key + ".", {"controller", "robots", "start_poses"},
                       problems);
            if (tj.contains("controller")) {
                const auto k = tj.at("controller").get<std::string>();
                if (k == "proposed") out.controller = ControllerKind::proposed;
                else if (k == "baseline") out.controller = ControllerKind::baseline;
                else problems.push_back(std::string("teams.") + key +
                                        ".controller must be 'proposed' or 'baseline'");
            }
            detail::get_to_if(tj, "robots", out.robots);
            if (tj.contains("start_poses")) {
                out.start_poses.clear();
                for (const auto& pj : tj.at("start_poses")) {
                    if (!pj.is_array() || pj.size() != 3) {
                        problems.push_back(std::string("teams.") + key +
                                           ".start_poses entries must be [x, y, theta]");
                        continue;
                    }
                    Pose p;
                    p.position.x = pj[0].get<double>();
                    p.position.y = pj[1].get<double>();
                    p.heading = normalize_angle(pj[2].get<double>());
                    out.start_poses.push_back(p);
                }
            }
        };
        read_team("a", c.team_a);
        read_team("b", c.team_b);
    }
    get_to_if(j, "fuzzy_table", c.fuzzy_table_path);
    if (j.contains("start_jitter")) {
        const auto& s = j.at("start_jitter");
        check_keys(s, "start_jitter.", {"pos_mm", "heading_deg"}, problems);
        get_to_if(s, "pos_mm", c.start_jitter_pos);
        get_to_if(s, "heading_deg", c.start_jitter_deg);
    }

    for (const auto& v : validate(c)) problems.push_back(v);
    if (!problems.empty()) {
        std::string msg = "invalid scenario config:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw config_error(msg);
    }
    return c;
}

inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("scenario file " + path + ": " + e.what());
    }
    return scenario_from_json(j);
}

// ---------------------------------------------------------------------------
// Camera setup
// ---------------------------------------------------------------------------

/// Grid of exact correspondences for the synthetic overhead camera that maps
/// the field into the frame with the configured pixel margin.
inline std::vector<Correspondence> field_calibration_grid(const FieldSpec& field,
                                                          const VisionConfig& vis) {
    const double su = (vis.width - 2.0 * vis.margin_px) / field.length;
    const double sv = (vis.height - 2.0 * vis.margin_px) / field.width;
    std::vector<Correspondence> points;
    constexpr int nx = 6, ny = 5;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const double x = field.length * ix / (nx - 1);
            const double y = field.width * iy / (ny - 1);
            points.push_back({vis.margin_px + su * x, vis.margin_px + sv * y, x, y});
        }
    }
    return points;
}

inline CalibrationMap make_field_calibration(const FieldSpec& field, const VisionConfig& vis) {
    return fit_calibration(field_calibration_grid(field, vis));
}

/// Worst-case ball speed seen by the camera, px/s.
inline double ball_speed_px(const FieldSpec& field, const VisionConfig& vis, double ball_v_max) {
    const double su = (vis.width - 2.0 * vis.margin_px) / field.length;
    const double sv = (vis.height - 2.0 * vis.margin_px) / field.width;
    return ball_v_max * std::max(su, sv);
}

/// World size of one pixel (the coarser axis), mm.
inline double world_pixel_size(const FieldSpec& field, const VisionConfig& vis) {
    const double su = (vis.width - 2.0 * vis.margin_px) / field.length;
    const double sv = (vis.height - 2.0 * vis.margin_px) / field.width;
    return 1.0 / std::min(su, sv);
}

// ---------------------------------------------------------------------------
// Policies
// ---------------------------------------------------------------------------

/// What a single robot's policy sees at one tick.
struct PolicyView {
    Pose robot;
    Team team = Team::a;
    const BallTracker* tracker = nullptr;
    BallObservation obs;
    GoalkeeperView goal; // the attacked goal and the keeper defending it
    FieldSpec field;
    ControlGains gains;
    double tick_s = 0.035;
};

struct BaselineState {
    Point2 ball_memory;
    bool seen = false;
};

/// The preceding method: drive proportionally at the current observation and
/// recompute a pure turn toward the goal once the ball is reached.
inline WheelCommand baseline_policy(const PolicyView& v, BaselineState& st,
                                    double near_threshold = 120.0, double align_tol_deg = 5.0) {
    if (v.obs.valid) {
        st.ball_memory = v.obs.world;
        st.seen = true;
    }
    const Point2 ball = st.seen ? st.ball_memory : v.field.center();
    const double d = distance(v.robot.position, ball);
    if (d >= near_threshold) {
        return proportional_control(compute_errors(v.robot, ball), v.gains);
    }
    const Point2 goal_center{v.field.attacked_goal_x(v.team), v.field.center_y()};
    const AngleDeg desired =
        (ball == goal_center) ? v.robot.heading : bearing(ball, goal_center);
    const double err = normalize_angle(desired.degrees - v.robot.heading.degrees).degrees;
    if (std::abs(err) > align_tol_deg) {
        return turn_control(v.robot.heading, desired, v.gains);
    }
    return proportional_control(compute_errors(v.robot, ball), v.gains);
}

struct ProposedState {
    ShootState shoot;
};

/// The full pipeline: predicted kick point, fuzzy approach, align, dash.
inline WheelCommand proposed_policy(const PolicyView& v, ProposedState& st, const ShootConfig& cfg,
                                    const FuzzyTable& table, bool* phase_changed = nullptr) {
    if (v.tracker == nullptr || !v.tracker->initialized()) {
        if (phase_changed) *phase_changed = false;
        return {0.0, 0.0};
    }
    const ShootView sv{v.robot, v.tracker, v.goal, v.field};
    const ShootOutput out = shoot_step(sv, st.shoot, cfg, table, v.gains, v.tick_s);
    st.shoot = out.state;
    if (phase_changed) *phase_changed = out.phase_changed;
    return out.command;
}

/// Shared keeper plumbing, identical for both teams: hold the goal line and
/// track the ball's y, clamped to the goal mouth.
inline WheelCommand keeper_policy(const PolicyView& v, const FuzzyTable& table) {
    const double own_goal_x = v.field.attacked_goal_x(v.team == Team::a ? Team::b : Team::a);
    const double line_x = own_goal_x == 0.0 ? 100.0 : v.field.length - 100.0;
    double ball_y = v.field.center_y();
    if (v.tracker != nullptr && v.tracker->initialized()) {
        ball_y = v.tracker->position().y;
    }
    const double target_y = std::clamp(ball_y, v.field.mouth_low(), v.field.mouth_high());
    return fuzzy_control(v.robot, {line_x, target_y}, AngleDeg{90.0}, table, v.gains);
}

// ---------------------------------------------------------------------------
// Match engine
// ---------------------------------------------------------------------------

struct MatchResult {
    int goals_a = 0;
    int goals_b = 0;
    int kicks_a = 0;
    int kicks_b = 0;
    int shot_attempts_a = 0; // dash-phase entries
    int shot_attempts_b = 0;
    TrajectoryLog log;
    double wall_seconds = 0.0;
    double mean_tick_ms = 0.0;
};

inline std::vector<Pose> default_formation(Team team, const FieldSpec& field, int robots) {
    const double cy = field.center_y();
    std::vector<Pose> poses;
    const bool left = team == Team::a; // team a defends x = 0
    const double keeper_x = left ? 100.0 : field.length - 100.0;
    poses.push_back({{keeper_x, cy}, AngleDeg{90.0}});
    const double fx = left ? 600.0 : field.length - 600.0;
    const AngleDeg fh{left ? 0.0 : 180.0};
    const double spread[] = {-300.0, 300.0, -600.0, 600.0};
    for (int i = 1; i < robots; ++i) {
        poses.push_back({{fx, cy + spread[(i - 1) % 4]}, fh});
    }
    return poses;
}

inline long tick_count(const ScenarioConfig& cfg) {
    return static_cast<long>(std::floor(cfg.duration_s / cfg.tick_s + 1e-9));
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t state = seed ^ (0x9e3779b97f4a7c15ULL * (salt + 1));
    return detail::splitmix64(state);
}

/// Run one full match. Deterministic: the seed drives only start jitter and
/// mask noise; physics and control are noise-free.
inline MatchResult run_match(const ScenarioConfig& cfg) {
    validate_or_throw(cfg);
    const auto t_start = std::chrono::steady_clock::now();

    const FuzzyTable* table = &FuzzyTable::defaults();
    FuzzyTable loaded;
    if (!cfg.fuzzy_table_path.empty()) {
        std::ifstream in(cfg.fuzzy_table_path);
        if (!in) throw config_error("cannot open fuzzy table: " + cfg.fuzzy_table_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        loaded = FuzzyTable::from_text(ss.str());
        table = &loaded;
    }

    ControlGains gains = cfg.gains;
    gains.v_max = cfg.physics.v_max;

    const CalibrationMap cal = make_field_calibration(cfg.field, cfg.vision);
    const double v_max_px = ball_speed_px(cfg.field, cfg.vision, cfg.physics.ball_v_max);
    const RenderSpec render{cfg.vision.width, cfg.vision.height, cfg.vision.ball_radius_px};

    // World setup: keeper first per team, then field robots, team a then b.
    WorldState world;
    std::mt19937_64 jitter_rng(cfg.seed);
    const auto jitter = [&](Pose p, bool is_keeper) {
        if (is_keeper) return p;
        std::uniform_real_distribution<double> dp(-cfg.start_jitter_pos, cfg.start_jitter_pos);
        std::uniform_real_distribution<double> dh(-cfg.start_jitter_deg, cfg.start_jitter_deg);
        p.position.x = std::clamp(p.position.x + dp(jitter_rng), cfg.half_size,
                                  cfg.field.length - cfg.half_size);
        p.position.y = std::clamp(p.position.y + dp(jitter_rng), cfg.half_size,
                                  cfg.field.width - cfg.half_size);
        p.heading = normalize_angle(p.heading.degrees + dh(jitter_rng));
        return p;
    };
    std::vector<std::size_t> keeper_index(2, 0);
    for (const Team team : {Team::a, Team::b}) {
        const TeamConfig& tc = team == Team::a ? cfg.team_a : cfg.team_b;
        const auto poses =
            tc.start_poses.empty() ? default_formation(team, cfg.field, tc.robots) : tc.start_poses;
        keeper_index[static_cast<int>(team)] = world.robots.size();
        for (std::size_t i = 0; i < poses.size(); ++i) {
            RobotBody body;
            body.pose = tc.start_poses.empty() ? jitter(poses[i], i == 0) : poses[i];
            body.wheel_base = cfg.wheel_base;
            body.half_size = cfg.half_size;
            body.team = team;
            world.robots.push_back(body);
        }
    }
    world.ball = BallState{cfg.field.center(), {0.0, 0.0}};

    BallTracker tracker(cfg.filter, cfg.filter_mode, cfg.max_coast);
    BallLocator locator(cfg.vision.ball_radius_px, v_max_px, cfg.tick_s);

    struct RobotPolicy {
        bool is_keeper = false;
        ControllerKind kind = ControllerKind::proposed;
        BaselineState baseline;
        ProposedState proposed;
    };
    std::vector<RobotPolicy> policies(world.robots.size());
    for (std::size_t i = 0; i < world.robots.size(); ++i) {
        const Team team = world.robots[i].team;
        const TeamConfig& tc = team == Team::a ? cfg.team_a : cfg.team_b;
        policies[i].is_keeper = i == keeper_index[static_cast<int>(team)];
        policies[i].kind = tc.controller;
    }

    MatchResult result;
    result.log.controller_a = controller_name(cfg.team_a.controller);
    result.log.controller_b = controller_name(cfg.team_b.controller);
    result.log.tick_s = cfg.tick_s;
    result.log.robot_count = static_cast<int>(world.robots.size());

    const long ticks = tick_count(cfg);
    result.log.rows.reserve(ticks);
    std::vector<WheelCommand> commands(world.robots.size());
    std::vector<std::string> events;
    double tick_ms_sum = 0.0;

    for (long tick = 0; tick < ticks; ++tick) {
        const auto t0 = std::chrono::steady_clock::now();
        events.clear();

        // Vision
        const PixelNoise noise{cfg.vision.noise_rate, mix_seed(cfg.seed, static_cast<std::uint64_t>(tick))};
        const PixelFrame frame = render_frame(world, cal, noise, render);
        const DynamicWindow window = locator.next_window(frame.width, frame.height);
        BallObservation obs = extract_ball(frame, window, cfg.vision.ball_radius_px);
        if (obs.valid) {
            obs.world = pixel_to_world(cal, obs.u, obs.v);
        }
        locator.note(obs);
        tracker.observe(obs.valid ? std::optional<Point2>(obs.world) : std::nullopt);

        // Control
        for (std::size_t i = 0; i < world.robots.size(); ++i) {
            const Team team = world.robots[i].team;
            const Team other = team == Team::a ? Team::b : Team::a;
            PolicyView view;
            view.robot = world.robots[i].pose;
            view.team = team;
            view.tracker = &tracker;
            view.obs = obs;
            view.field = cfg.field;
            view.gains = gains;
            view.tick_s = cfg.tick_s;
            const double gx = cfg.field.attacked_goal_x(team);
            view.goal.mouth_low = {gx, cfg.field.mouth_low()};
            view.goal.mouth_high = {gx, cfg.field.mouth_high()};
            const TeamConfig& other_cfg = other == Team::a ? cfg.team_a : cfg.team_b;
            view.goal.keeper = other_cfg.robots >= 1
                                   ? world.robots[keeper_index[static_cast<int>(other)]].pose.position
                                   : Point2{gx, cfg.field.center_y()};

            auto& pol = policies[i];
            if (pol.is_keeper) {
                commands[i] = keeper_policy(view, *table);
            } else if (pol.kind == ControllerKind::baseline) {
                commands[i] = baseline_policy(view, pol.baseline, cfg.shoot.near_threshold,
                                              cfg.shoot.align_tol_deg);
            } else {
                bool phase_changed = false;
                commands[i] = proposed_policy(view, pol.proposed, cfg.shoot, *table, &phase_changed);
                if (phase_changed) {
                    events.push_back("phase:" + std::to_string(i) + ":" +
                                     phase_name(pol.proposed.shoot.phase));
                    if (pol.proposed.shoot.phase == ShootPhase::dash) {
                        (team == Team::a ? result.shot_attempts_a : result.shot_attempts_b) += 1;
                    }
                }
            }
        }

        // Physics + scoring
        const auto kicks = step_world(world, commands, cfg.tick_s, cfg.field, cfg.physics);
        for (const auto& k : kicks) {
            events.push_back("kick:" + std::to_string(k.robot_index));
            (world.robots[k.robot_index].team == Team::a ? result.kicks_a : result.kicks_b) += 1;
        }
        if (const auto scorer = detect_goal(world, cfg.field)) {
            events.push_back(std::string("goal:") + team_name(*scorer));
        }

        // Log
        LogRow row;
        row.tick = tick;
        row.clock_s = world.clock;
        for (std::size_t e = 0; e < events.size(); ++e) {
            if (e) row.event += ';';
            row.event += events[e];
        }
        row.ball = world.ball.position;
        row.ball_vel = world.ball.velocity;
        row.obs_valid = obs.valid;
        row.obs_u = obs.u;
        row.obs_v = obs.v;
        row.obs_world = obs.world;
        row.est_pos = tracker.position();
        row.est_vel = tracker.velocity();
        row.pred = tracker.prediction();
        row.robots.reserve(world.robots.size());
        for (const auto& r : world.robots) row.robots.push_back(r.pose);
        row.score_a = world.score_a;
        row.score_b = world.score_b;
        result.log.rows.push_back(std::move(row));

        tick_ms_sum +=
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
    }

    result.goals_a = world.score_a;
    result.goals_b = world.score_b;
    result.log.final_a = world.score_a;
    result.log.final_b = world.score_b;
    result.mean_tick_ms = ticks > 0 ? tick_ms_sum / static_cast<double>(ticks) : 0.0;
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    const auto check = verify_log(result.log);
    if (!check.ok || check.goals_a != result.goals_a || check.goals_b != result.goals_b) {
        throw contract_error("run_match: trajectory log inconsistent with final score");
    }
    return result;
}

// ---------------------------------------------------------------------------
// Tournament
// ---------------------------------------------------------------------------

struct RoundResult {
    int round = 0;
    std::size_t pairing = 0;
    MatchResult match;
};

struct TournamentReport {
    std::vector<RoundResult> rounds;
    int total_a = 0;
    int total_b = 0;

    std::string table_text(const std::vector<ScenarioConfig>& pairings) const {
        std::ostringstream out;
        for (std::size_t p = 0; p < pairings.size(); ++p) {
            out << "pairing " << p + 1 << ": A=" << controller_name(pairings[p].team_a.controller)
                << " vs B=" << controller_name(pairings[p].team_b.controller) << '\n';
            out << "round";
            for (const auto& r : rounds) {
                if (r.pairing == p) out << '\t' << r.round + 1;
            }
            out << "\ngoals";
            for (const auto& r : rounds) {
                if (r.pairing == p) {
                    out << '\t' << r.match.goals_a << '(' << r.match.goals_b << ')';
                }
            }
            out << "\nshots";
            for (const auto& r : rounds) {
                if (r.pairing == p) {
                    out << '\t' << r.match.shot_attempts_a << '(' << r.match.shot_attempts_b << ')';
                }
            }
            out << '\n';
        }
        out << "total goals: A=" << total_a << " B=" << total_b << '\n';
        return out.str();
    }
};

/// Run every pairing for the given number of rounds with per-round derived
/// seeds and aggregate the goal and shot statistics, in round order.
inline TournamentReport run_round_robin(const std::vector<ScenarioConfig>& pairings, int rounds) {
    if (rounds < 1) throw config_error("tournament: rounds must be >= 1");
    if (pairings.empty()) throw config_error("tournament: need at least one pairing");
    TournamentReport report;
    for (int r = 0; r < rounds; ++r) {
        for (std::size_t p = 0; p < pairings.size(); ++p) {
            ScenarioConfig cfg = pairings[p];
            cfg.seed = mix_seed(pairings[p].seed, static_cast<std::uint64_t>(r) * 1000 + p);
            RoundResult rr;
            rr.round = r;
            rr.pairing = p;
            rr.match = run_match(cfg);
            report.total_a += rr.match.goals_a;
            report.total_b += rr.match.goals_b;
            report.rounds.push_back(std::move(rr));
        }
    }
    return report;
}

} // namespace robosoc
