#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "robosoc/errors.hpp"
#include "robosoc/geometry.hpp"

// Ground-truth physics: differential-drive kinematics, ball motion with
// rolling friction and wall restitution, kicks, goal detection and the
// fixed-step match clock. Everything here is deterministic given its inputs.

namespace robosoc {

enum class Team { a, b }; // team a attacks the +X goal, team b the -X goal

inline const char* team_name(Team t) { return t == Team::a ? "A" : "B"; }

struct Pose {
    Point2 position;
    AngleDeg heading; // normalized after every update
};

/// Left/right wheel ground speeds in mm/s, the output of every controller.
struct WheelCommand {
    double v_left = 0.0;
    double v_right = 0.0;
};

inline WheelCommand clamp_command(WheelCommand c, double v_max) {
    return {std::clamp(c.v_left, -v_max, v_max), std::clamp(c.v_right, -v_max, v_max)};
}

inline double forward_speed(WheelCommand c) { return 0.5 * (c.v_left + c.v_right); }

struct RobotBody {
    Pose pose;
    double wheel_base = 10.0; // distance between wheel contact points, mm
    double half_size = 37.5;  // square body half-width, mm
    Team team = Team::a;
    WheelCommand last_command; // command applied during the current tick
};

struct BallState {
    Point2 position;
    Vec2 velocity; // mm/s
};

struct FieldSpec {
    double length = 2200.0;    // mm, X extent; goals on the x = 0 and x = length lines
    double width = 1800.0;     // mm, Y extent
    double goal_width = 400.0; // goal mouth, centered on the field midline

    double center_y() const { return 0.5 * width; }
    double mouth_low() const { return center_y() - 0.5 * goal_width; }
    double mouth_high() const { return center_y() + 0.5 * goal_width; }
    Point2 center() const { return {0.5 * length, center_y()}; }
    bool in_mouth(double y) const { return y > mouth_low() && y < mouth_high(); }

    /// Goal line x-coordinate of the goal this team attacks.
    double attacked_goal_x(Team t) const { return t == Team::a ? length : 0.0; }
};

struct PhysicsParams {
    double v_max = 1000.0;        // wheel speed clamp, mm/s
    double ball_v_max = 2000.0;   // ball speed clamp, mm/s
    double ball_radius = 21.3;    // mm
    double friction = 0.2;        // rolling friction decay rate, 1/s
    double restitution = 0.8;     // wall bounce, applied to the normal component
    double kick_gain = 1.5;       // ball speed = gain * robot forward speed
    double kick_contact_tol = 2.0; // extra contact slack beyond body + ball radius, mm
    double kick_cone_deg = 45.0;  // ball must lie within this cone of the heading
    int substeps = 5;             // physics substeps per control tick
};

struct WorldState {
    std::vector<RobotBody> robots;
    BallState ball;
    double clock = 0.0; // seconds since kickoff
    int score_a = 0;
    int score_b = 0;
};

/// One explicit-Euler step of the unicycle model driven through the
/// differential-drive reduction v = (vl+vr)/2, omega = (vr-vl)/wheel_base.
inline Pose step_robot(const Pose& pose, WheelCommand cmd, double dt, double wheel_base) {
    const double v = forward_speed(cmd);
    const double omega = (cmd.v_right - cmd.v_left) / wheel_base; // rad/s
    const double hr = deg2rad(pose.heading.degrees);
    Pose next;
    next.position.x = pose.position.x + v * std::cos(hr) * dt;
    next.position.y = pose.position.y + v * std::sin(hr) * dt;
    next.heading = normalize_angle(pose.heading.degrees + rad2deg(omega) * dt);
    return next;
}

namespace detail {

// Reflect a 1-D coordinate off [lo, hi]; scales the velocity component by
// the restitution on contact. One bounce per step is enough at sane speeds.
inline void reflect_axis(double& pos, double& vel, double lo, double hi, double restitution) {
    if (pos < lo) {
        pos = lo + (lo - pos);
        vel = -restitution * vel;
    } else if (pos > hi) {
        pos = hi - (pos - hi);
        vel = -restitution * vel;
    }
}

} // namespace detail

/// Advance the ball: integrate position, decay speed by exp(-friction*dt),
/// and bounce off walls. The end walls are open across the goal mouth so the
/// ball can cross the goal line there.
inline BallState step_ball(const BallState& ball, double dt, const FieldSpec& field,
                           const PhysicsParams& p) {
    BallState next;
    next.position = ball.position + dt * ball.velocity;
    const double decay = std::exp(-p.friction * dt);
    next.velocity = decay * ball.velocity;

    const double r = p.ball_radius;
    detail::reflect_axis(next.position.y, next.velocity.y, r, field.width - r, p.restitution);
    if (!field.in_mouth(next.position.y)) {
        detail::reflect_axis(next.position.x, next.velocity.x, r, field.length - r, p.restitution);
    }

    const double speed = norm(next.velocity);
    if (speed > p.ball_v_max) {
        next.velocity = (p.ball_v_max / speed) * next.velocity;
    }
    return next;
}

/// True when the ball touches the robot's front face: within contact distance
/// and inside the front cone of the heading.
inline bool kick_contact(const RobotBody& robot, const BallState& ball, const PhysicsParams& p) {
    const double d = distance(robot.pose.position, ball.position);
    if (d > robot.half_size + p.ball_radius + p.kick_contact_tol) return false;
    if (d == 0.0) return true;
    const AngleDeg to_ball = bearing(robot.pose.position, ball.position);
    const double off = normalize_angle(to_ball.degrees - robot.pose.heading.degrees).degrees;
    return std::abs(off) <= p.kick_cone_deg;
}

/// Contact momentum transfer: the ball leaves along the robot's forward axis
/// at kick_gain times the robot's forward speed, clamped to the ball limit.
inline BallState resolve_kick(const RobotBody& robot, const BallState& ball,
                              const PhysicsParams& p) {
    if (!kick_contact(robot, ball, p)) {
        throw contract_error("resolve_kick: no front-face contact");
    }
    const Vec2 fwd = heading_vector(robot.pose.heading);
    double speed = p.kick_gain * forward_speed(robot.last_command);
    speed = std::clamp(speed, -p.ball_v_max, p.ball_v_max);
    return BallState{ball.position, speed * fwd};
}

/// Checks the goal lines. On a goal: increments the score, resets the ball to
/// the field center and reports the scoring team. The clock keeps running.
inline std::optional<Team> detect_goal(WorldState& world, const FieldSpec& field) {
    const Point2 bp = world.ball.position;
    if (!field.in_mouth(bp.y)) return std::nullopt;
    std::optional<Team> scorer;
    if (bp.x > field.length) {
        scorer = Team::a;
        ++world.score_a;
    } else if (bp.x < 0.0) {
        scorer = Team::b;
        ++world.score_b;
    }
    if (scorer) {
        world.ball = BallState{field.center(), {0.0, 0.0}};
    }
    return scorer;
}

struct KickEvent {
    std::size_t robot_index;
};

/// Advance the whole world by one control tick of length dt. Commands are
/// held constant; contact handling runs at dt/substeps. Collisions are
/// resolved by positional projection only (no rotation transfer).
inline std::vector<KickEvent> step_world(WorldState& world, const std::vector<WheelCommand>& commands,
                                         double dt, const FieldSpec& field, const PhysicsParams& p) {
    if (commands.size() != world.robots.size()) {
        throw contract_error("step_world: one command per robot required");
    }
    const int n_sub = std::max(1, p.substeps);
    const double h = dt / n_sub;
    std::vector<bool> kicked(world.robots.size(), false);

    for (std::size_t i = 0; i < world.robots.size(); ++i) {
        world.robots[i].last_command = clamp_command(commands[i], p.v_max);
    }

    for (int s = 0; s < n_sub; ++s) {
        for (auto& robot : world.robots) {
            robot.pose = step_robot(robot.pose, robot.last_command, h, robot.wheel_base);
            robot.pose.position.x =
                std::clamp(robot.pose.position.x, robot.half_size, field.length - robot.half_size);
            robot.pose.position.y =
                std::clamp(robot.pose.position.y, robot.half_size, field.width - robot.half_size);
        }

        // Robot-robot separation, disc approximation, each yields half.
        for (std::size_t i = 0; i < world.robots.size(); ++i) {
            for (std::size_t j = i + 1; j < world.robots.size(); ++j) {
                auto& a = world.robots[i];
                auto& b = world.robots[j];
                const double min_d = a.half_size + b.half_size;
                const Vec2 diff = b.pose.position - a.pose.position;
                const double d = norm(diff);
                if (d >= min_d || d == 0.0) continue;
                const Vec2 n = (1.0 / d) * diff;
                const double push = 0.5 * (min_d - d);
                a.pose.position = a.pose.position - push * n;
                b.pose.position = b.pose.position + push * n;
            }
        }

        world.ball = step_ball(world.ball, h, field, p);

        for (std::size_t i = 0; i < world.robots.size(); ++i) {
            auto& robot = world.robots[i];
            if (kick_contact(robot, world.ball, p) && forward_speed(robot.last_command) > 0.0) {
                world.ball = resolve_kick(robot, world.ball, p);
                if (!kicked[i]) {
                    kicked[i] = true;
                }
            } else {
                // Non-kick contact: push the ball out to the contact distance.
                const double min_d = robot.half_size + p.ball_radius;
                const Vec2 diff = world.ball.position - robot.pose.position;
                const double d = norm(diff);
                if (d < min_d && d > 0.0) {
                    world.ball.position = robot.pose.position + (min_d / d) * diff;
                }
            }
        }

        // Keep the ball on the table after push-outs (goal mouth stays open).
        const double r = p.ball_radius;
        world.ball.position.y = std::clamp(world.ball.position.y, r, field.width - r);
        if (!field.in_mouth(world.ball.position.y)) {
            world.ball.position.x = std::clamp(world.ball.position.x, r, field.length - r);
        }
    }

    world.clock += dt;

    std::vector<KickEvent> events;
    for (std::size_t i = 0; i < kicked.size(); ++i) {
        if (kicked[i]) events.push_back(KickEvent{i});
    }
    return events;
}

} // namespace robosoc
