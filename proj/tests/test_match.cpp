#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "robosoc/match.hpp"
#include "robosoc/svg_plot.hpp"

using namespace robosoc;

namespace {

ScenarioConfig short_config(double seconds = 5.0) {
    ScenarioConfig cfg;
    cfg.seed = 12345;
    cfg.duration_s = seconds;
    return cfg;
}

} // namespace

TEST_CASE("run_match logs exactly duration/T ticks") {
    ScenarioConfig cfg = short_config(0.35);
    const MatchResult result = run_match(cfg);
    CHECK(result.log.rows.size() == 10);
    CHECK(result.log.rows.back().clock_s == Catch::Approx(0.35));
}

TEST_CASE("identical config and seed give byte-identical logs") {
    const ScenarioConfig cfg = short_config(5.0);
    const MatchResult a = run_match(cfg);
    const MatchResult b = run_match(cfg);
    CHECK(a.log.to_string() == b.log.to_string());

    ScenarioConfig other = cfg;
    other.seed = 999; // different jitter and noise stream
    const MatchResult c = run_match(other);
    CHECK(a.log.to_string() != c.log.to_string());
}

TEST_CASE("config validation enumerates every violated field") {
    ScenarioConfig cfg = short_config();
    cfg.duration_s = -1.0;
    cfg.field.goal_width = 5000.0;
    cfg.physics.restitution = 1.5;
    cfg.team_a.robots = 0;
    const auto problems = validate(cfg);
    CHECK(problems.size() == 4);
    CHECK_THROWS_AS(run_match(cfg), config_error);
}

TEST_CASE("scenario json loading") {
    SECTION("round trip with overrides") {
        const auto j = nlohmann::json::parse(R"({
            "seed": 7,
            "duration_s": 1.0,
            "field": {"length_mm": 2000, "width_mm": 1600, "goal_width_mm": 350},
            "teams": {"a": {"controller": "baseline", "robots": 2},
                      "b": {"controller": "proposed", "robots": 3}},
            "filter": {"g": 0.4, "h": 0.2, "mode": "as_printed"}
        })");
        const ScenarioConfig cfg = scenario_from_json(j);
        CHECK(cfg.seed == 7);
        CHECK(cfg.field.length == 2000.0);
        CHECK(cfg.team_a.controller == ControllerKind::baseline);
        CHECK(cfg.team_a.robots == 2);
        CHECK(cfg.filter.g == 0.4);
        CHECK(cfg.filter_mode == GhMode::as_printed);
    }
    SECTION("missing seed is an error") {
        CHECK_THROWS_AS(scenario_from_json(nlohmann::json::parse("{}")), config_error);
    }
    SECTION("unknown keys are errors and all get reported") {
        const auto j = nlohmann::json::parse(R"({
            "seed": 1, "bogus": 2, "vision": {"weird_key": 3}
        })");
        try {
            scenario_from_json(j);
            FAIL("expected config_error");
        } catch (const config_error& e) {
            const std::string msg = e.what();
            CHECK(msg.find("bogus") != std::string::npos);
            CHECK(msg.find("vision.weird_key") != std::string::npos);
        }
    }
    SECTION("explicit start poses must match the roster size") {
        const auto j = nlohmann::json::parse(R"({
            "seed": 1,
            "teams": {"a": {"robots": 2, "start_poses": [[100, 900, 0]]}}
        })");
        CHECK_THROWS_AS(scenario_from_json(j), config_error);
    }
}

TEST_CASE("baseline policy recalculates a pure turn at the ball") {
    PolicyView view;
    view.robot = {{1000.0, 900.0}, AngleDeg{135.0}};
    view.team = Team::a;
    view.field = FieldSpec{};
    view.gains = ControlGains{};
    view.obs.valid = true;
    view.obs.world = {1050.0, 900.0}; // 50 mm away: inside the near threshold
    BaselineState st;
    const WheelCommand cmd = baseline_policy(view, st);
    // in-place turn toward the goal: equal and opposite wheels
    CHECK(cmd.v_left == Catch::Approx(-cmd.v_right));
    CHECK(cmd.v_right != 0.0);
    const AngleDeg want = bearing(view.obs.world, {view.field.length, view.field.center_y()});
    const WheelCommand expect = turn_control(view.robot.heading, want, view.gains);
    CHECK(cmd.v_left == expect.v_left);
    CHECK(cmd.v_right == expect.v_right);
}

TEST_CASE("baseline policy chases the raw observation when far") {
    PolicyView view;
    view.robot = {{400.0, 400.0}, AngleDeg{0.0}};
    view.team = Team::a;
    view.field = FieldSpec{};
    view.gains = ControlGains{};
    view.obs.valid = true;
    view.obs.world = {1400.0, 1000.0};
    BaselineState st;
    const WheelCommand cmd = baseline_policy(view, st);
    const WheelCommand expect =
        proportional_control(compute_errors(view.robot, view.obs.world), view.gains);
    CHECK(cmd.v_left == expect.v_left);
    CHECK(cmd.v_right == expect.v_right);

    // ball memory: losing the observation keeps the last seen target
    view.obs.valid = false;
    const WheelCommand remembered = baseline_policy(view, st);
    CHECK(remembered.v_left == expect.v_left);
}

TEST_CASE("proposed policy delegates to shoot_step") {
    const FieldSpec field;
    BallTracker tracker(FilterParams{}, GhMode::standard);
    for (int i = 0; i < 5; ++i) tracker.observe(Point2{1500.0, 900.0});

    PolicyView view;
    view.robot = {{600.0, 500.0}, AngleDeg{20.0}};
    view.team = Team::a;
    view.tracker = &tracker;
    view.field = field;
    view.gains = ControlGains{};
    view.goal = {{2100.0, 900.0}, {field.length, field.mouth_low()},
                 {field.length, field.mouth_high()}};

    ProposedState st;
    const WheelCommand cmd = proposed_policy(view, st, ShootConfig{}, FuzzyTable::defaults());

    const ShootView sv{view.robot, &tracker, view.goal, field};
    const ShootOutput direct =
        shoot_step(sv, ShootState{}, ShootConfig{}, FuzzyTable::defaults(), view.gains, 0.035);
    CHECK(cmd.v_left == direct.command.v_left);
    CHECK(cmd.v_right == direct.command.v_right);
    CHECK(st.shoot.phase == direct.state.phase);
}

TEST_CASE("keeper clamps its target to the goal mouth") {
    const FieldSpec field;
    BallTracker tracker(FilterParams{}, GhMode::standard);
    for (int i = 0; i < 5; ++i) tracker.observe(Point2{400.0, field.width - 50.0}); // far corner

    PolicyView view;
    view.robot = {{100.0, field.center_y()}, AngleDeg{90.0}};
    view.team = Team::a;
    view.tracker = &tracker;
    view.field = field;
    view.gains = ControlGains{};

    const WheelCommand cmd = keeper_policy(view, FuzzyTable::defaults());
    const WheelCommand expect = fuzzy_control(view.robot, {100.0, field.mouth_high()},
                                              AngleDeg{90.0}, FuzzyTable::defaults(), view.gains);
    CHECK(cmd.v_left == expect.v_left);
    CHECK(cmd.v_right == expect.v_right);
}

TEST_CASE("trajectory log round-trips and verifies") {
    const ScenarioConfig cfg = short_config(2.0);
    const MatchResult result = run_match(cfg);

    std::stringstream ss(result.log.to_string());
    const TrajectoryLog parsed = TrajectoryLog::parse(ss);
    CHECK(parsed.rows.size() == result.log.rows.size());
    CHECK(parsed.controller_a == "proposed");
    CHECK(parsed.to_string() == result.log.to_string());

    const LogVerification v = verify_log(parsed);
    CHECK(v.ok);
    CHECK(v.goals_a == result.goals_a);

    SECTION("tampered scores are caught") {
        TrajectoryLog bad = parsed;
        bad.final_a += 1;
        CHECK_FALSE(verify_log(bad).ok);
    }
    SECTION("tampered clock is caught") {
        TrajectoryLog bad = parsed;
        bad.rows[1].clock_s += 1.0;
        CHECK_FALSE(verify_log(bad).ok);
    }
}

TEST_CASE("svg plot contains the field and the trajectories") {
    const ScenarioConfig cfg = short_config(1.0);
    const MatchResult result = run_match(cfg);
    std::ostringstream svg;
    write_trajectory_svg(svg, result.log, cfg.field);
    const std::string text = svg.str();
    CHECK(text.find("<svg") != std::string::npos);
    CHECK(text.find("<polyline") != std::string::npos);
    CHECK(text.find("</svg>") != std::string::npos);
}

TEST_CASE("tournament structure and validation") {
    ScenarioConfig cfg = short_config(1.0);
    const std::vector<ScenarioConfig> pairings{cfg};
    SECTION("rounds must be positive") {
        CHECK_THROWS_AS(run_round_robin(pairings, 0), config_error);
    }
    SECTION("one pairing, 4 rounds makes 4 results") {
        const TournamentReport report = run_round_robin(pairings, 4);
        CHECK(report.rounds.size() == 4);
        const std::string table = report.table_text(pairings);
        CHECK(table.find("round\t1\t2\t3\t4") != std::string::npos);
        CHECK(report.total_a ==
              report.rounds[0].match.goals_a + report.rounds[1].match.goals_a +
                  report.rounds[2].match.goals_a + report.rounds[3].match.goals_a);
    }
}

TEST_CASE("mirrored controllers draw on average", "[slow]") {
    // identical controllers on both sides: the goal difference over many
    // seeded rounds is centered on zero
    ScenarioConfig cfg = short_config(60.0);
    cfg.team_a.controller = ControllerKind::baseline;
    cfg.team_b.controller = ControllerKind::baseline;
    cfg.seed = 2026;
    const TournamentReport report = run_round_robin({cfg}, 50);
    double diff = 0.0;
    for (const auto& r : report.rounds) diff += r.match.goals_a - r.match.goals_b;
    diff /= static_cast<double>(report.rounds.size());
    CHECK(std::abs(diff) < 1.0);
}

TEST_CASE("one tick fits the 35 ms budget") {
    const ScenarioConfig cfg = short_config(3.0);
    const MatchResult result = run_match(cfg);
    CHECK(result.mean_tick_ms < 35.0);
}
