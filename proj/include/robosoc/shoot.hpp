#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "robosoc/control.hpp"
#include "robosoc/errors.hpp"
#include "robosoc/geometry.hpp"
#include "robosoc/tracker.hpp"
#include "robosoc/world.hpp"

// Shooting behavior: predict the ball, take the kick point behind it on the
// shooting line, align to the shooting direction, then dash through the ball.

namespace robosoc {

/// What the shooter knows about the defended goal.
struct GoalkeeperView {
    Point2 keeper;
    Point2 mouth_low;  // goal post end of the mouth, smaller y
    Point2 mouth_high; // larger y
};

struct ShootConfig {
    double near_threshold = 120.0; // "ball is very near": switch to aligning, mm
    double lateral_tol = 25.0;     // max offset from the shooting line at the back point, mm
    double align_tol_deg = 5.0;    // heading tolerance before the dash
    int dash_steps = 12;           // dash duration in control ticks
    double standoff = 78.8;        // kick point distance behind the ball, mm
    double revert_radius = 400.0;  // ball drift from phase entry that restarts the attempt
    double aim_inset = 21.3;       // aim this far inside each post (one ball radius), mm
    double orbit_offset = 130.0;   // flank waypoint distance beside the ball, mm
    int k_lead_fixed = 0;          // 0 = adaptive lead, otherwise the literal step count
    int k_lead_max = 30;
};

enum class ShootPhase { approach, align, dash, done };

inline const char* phase_name(ShootPhase p) {
    switch (p) {
    case ShootPhase::approach: return "Approach";
    case ShootPhase::align: return "Align";
    case ShootPhase::dash: return "Dash";
    case ShootPhase::done: return "Done";
    }
    return "?";
}

struct ShootState {
    ShootPhase phase = ShootPhase::approach;
    AngleDeg shoot_direction;
    Point2 kick_point;
    Point2 approach_target; // kick point, or a detour waypoint beside the ball
    int dash_steps_left = 0;
    Point2 phase_entry_ball; // tracked ball position when the phase began
    bool has_phase_entry = false;
    Point2 last_prediction; // ball prediction used for the current approach target
    // stall escape: traffic jams around the ball otherwise freeze forever
    Point2 last_position;
    bool has_last_position = false;
    int stall_ticks = 0;
    int backoff_ticks = 0;
};

/// Pick the aim point in the goal mouth (inset one ball radius from each
/// post) that maximizes distance to the keeper; ties break toward +Y.
/// Distance to a point is convex along the segment, so an endpoint wins.
inline AngleDeg choose_shoot_direction(Point2 ball, const GoalkeeperView& goal, double aim_inset) {
    const Point2 lo{goal.mouth_low.x, goal.mouth_low.y + aim_inset};
    const Point2 hi{goal.mouth_high.x, goal.mouth_high.y - aim_inset};
    const double d_lo = distance(goal.keeper, lo);
    const double d_hi = distance(goal.keeper, hi);
    const Point2 aim = (d_hi >= d_lo) ? hi : lo;
    return bearing(ball, aim);
}

struct KickPoint {
    Point2 point;
    bool clamped = false; // projected back inside the field
};

/// The point standoff mm behind the predicted ball along the shooting line.
inline KickPoint kick_point_for(Point2 ball_pred, AngleDeg shoot_dir, double standoff,
                                const FieldSpec& field) {
    if (standoff <= 0.0) {
        throw contract_error("kick_point_for: standoff must be positive");
    }
    const Vec2 dir = heading_vector(shoot_dir);
    KickPoint kp;
    kp.point = ball_pred - standoff * dir;
    const double x = std::clamp(kp.point.x, 0.0, field.length);
    const double y = std::clamp(kp.point.y, 0.0, field.width);
    if (x != kp.point.x || y != kp.point.y) {
        kp.point = {x, y};
        kp.clamped = true;
    }
    return kp;
}

/// Everything shoot_step reads each tick.
struct ShootView {
    Pose robot;
    const BallTracker* tracker = nullptr;
    GoalkeeperView goal;
    FieldSpec field;
};

struct ShootOutput {
    WheelCommand command;
    ShootState state;
    bool phase_changed = false;
};

/// One decision-cycle of the shooting procedure.
inline ShootOutput shoot_step(const ShootView& view, ShootState state, const ShootConfig& cfg,
                              const FuzzyTable& table, const ControlGains& gains,
                              double tick_seconds) {
    if (view.tracker == nullptr || !view.tracker->initialized()) {
        throw contract_error("shoot_step: tracker not initialized; warm up the filter first");
    }
    const ShootPhase entered_with = state.phase;
    const Point2 ball_now = view.tracker->position();

    if (state.phase == ShootPhase::done) {
        state = ShootState{}; // next attempt
    }

    // Stale plan guard: ball escaped the prediction this phase was built on.
    if (state.has_phase_entry &&
        distance(ball_now, state.phase_entry_ball) > cfg.revert_radius &&
        state.phase != ShootPhase::approach) {
        state.phase = ShootPhase::approach;
        state.has_phase_entry = false;
    }

    if (!state.has_phase_entry) {
        state.phase_entry_ball = ball_now;
        state.has_phase_entry = true;
    }

    // Stall escape: when bodies jam around the ball, everyone blocks and the
    // match freezes. A stalled approach backs away from the ball for a moment
    // and tries again; the jam breaks as robots unstick at different ticks.
    if (state.phase == ShootPhase::approach) {
        if (state.has_last_position &&
            distance(view.robot.position, state.last_position) < 0.35 &&
            distance(view.robot.position, state.approach_target) > 20.0 &&
            state.backoff_ticks == 0) {
            if (++state.stall_ticks > 40) {
                state.backoff_ticks = 30;
                state.stall_ticks = 0;
            }
        } else if (state.backoff_ticks == 0) {
            state.stall_ticks = 0;
        }
    } else {
        state.stall_ticks = 0;
        state.backoff_ticks = 0;
    }
    state.last_position = view.robot.position;
    state.has_last_position = true;

    if (state.phase == ShootPhase::approach && state.backoff_ticks > 0) {
        --state.backoff_ticks;
        Point2 away = view.robot.position;
        const double gap = distance(view.robot.position, ball_now);
        if (gap > 1e-9) {
            const Vec2 out = heading_vector(bearing(ball_now, view.robot.position));
            away = view.robot.position + 300.0 * out;
        }
        away.x = std::clamp(away.x, 50.0, view.field.length - 50.0);
        away.y = std::clamp(away.y, 50.0, view.field.width - 50.0);
        state.approach_target = away;
        const WheelCommand cmd =
            fuzzy_control(view.robot, away, state.shoot_direction, table, gains);
        return ShootOutput{cmd, state, state.phase != entered_with};
    }

    // Plan and cascade transitions first, so already-satisfied thresholds
    // pass Approach/Align within one decision cycle; then act per phase.
    if (state.phase == ShootPhase::approach) {
        int k = cfg.k_lead_fixed;
        if (k < 1) {
            const double gap = distance(view.robot.position, ball_now);
            k = static_cast<int>(std::ceil(gap / (gains.v_max * tick_seconds)));
        }
        k = std::clamp(k, 1, cfg.k_lead_max);
        const Point2 ball_pred = view.tracker->predict_point(k);
        state.last_prediction = ball_pred;
        state.shoot_direction = choose_shoot_direction(ball_pred, view.goal, cfg.aim_inset);
        state.kick_point = kick_point_for(ball_pred, state.shoot_direction, cfg.standoff,
                                          view.field).point;

        // Work in the shooting frame: s along the shot, perp to its left.
        // theta locates the robot around the ball: 0 in front, +-180 behind.
        const Vec2 s = heading_vector(state.shoot_direction);
        const Vec2 perp{-s.y, s.x};
        const Vec2 rel = view.robot.position - ball_pred;
        const double rel_fwd = rel.x * s.x + rel.y * s.y;
        const double rel_lat = rel.x * perp.x + rel.y * perp.y;
        const double theta = rad2deg(std::atan2(rel_lat, rel_fwd));

        if (std::abs(theta) > 135.0) {
            // in the behind sector: run straight at the kick point
            state.approach_target = state.kick_point;
        } else {
            // orbit around the ball toward the behind sector on our own side;
            // the chord of a 60 degree step keeps a wide berth of the ball
            const double side = rel_lat >= 0.0 ? 1.0 : -1.0;
            const double theta_wp = deg2rad(side > 0.0 ? std::min(theta + 60.0, 175.0)
                                                       : std::max(theta - 60.0, -175.0));
            const double r = cfg.orbit_offset;
            Point2 wp = ball_pred + (r * std::cos(theta_wp)) * s +
                        (r * std::sin(theta_wp)) * perp;
            wp.x = std::clamp(wp.x, cfg.standoff, view.field.length - cfg.standoff);
            wp.y = std::clamp(wp.y, cfg.standoff, view.field.width - cfg.standoff);
            state.approach_target = wp;
        }

        // the ball must be very near AND the robot behind it on the shooting
        // line; a straight dash from the side would sweep past the ball
        if (distance(view.robot.position, ball_now) < cfg.near_threshold &&
            rel_fwd < 0.0 && std::abs(rel_lat) < cfg.lateral_tol) {
            state.phase = ShootPhase::align;
            state.phase_entry_ball = ball_now;
        }
    }
    if (state.phase == ShootPhase::align) {
        const double err =
            normalize_angle(state.shoot_direction.degrees - view.robot.heading.degrees).degrees;
        if (std::abs(err) < cfg.align_tol_deg) {
            state.phase = ShootPhase::dash;
            state.dash_steps_left = cfg.dash_steps;
            state.phase_entry_ball = ball_now;
        }
    }

    WheelCommand cmd{0.0, 0.0};
    switch (state.phase) {
    case ShootPhase::approach:
        cmd = fuzzy_control(view.robot, state.approach_target, state.shoot_direction, table,
                            gains);
        break;
    case ShootPhase::align:
        cmd = turn_control(view.robot.heading, state.shoot_direction, gains);
        break;
    case ShootPhase::dash:
        cmd = {gains.v_max, gains.v_max};
        if (--state.dash_steps_left <= 0) {
            state.phase = ShootPhase::done;
        }
        break;
    case ShootPhase::done:
        break; // unreachable: reset above
    }

    return ShootOutput{cmd, state, state.phase != entered_with};
}

} // namespace robosoc
