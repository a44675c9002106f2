#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "robosoc/errors.hpp"
#include "robosoc/geometry.hpp"
#include "robosoc/world.hpp"

// Append-only per-tick match log with a versioned CSV schema. Formatting is
// fixed-precision so identical matches produce byte-identical files.

namespace robosoc {

inline constexpr const char* kLogVersionLine = "# robosoc-log v1";

struct LogRow {
    long tick = 0;
    double clock_s = 0.0;
    std::string event; // ';'-joined tokens: goal:A, kick:3, phase:1:Align
    Point2 ball;
    Vec2 ball_vel;
    bool obs_valid = false;
    double obs_u = 0.0;
    double obs_v = 0.0;
    Point2 obs_world;
    Point2 est_pos; // tracker smoothed position
    Vec2 est_vel;   // tracker smoothed velocity
    Point2 pred;    // tracker one-step prediction
    std::vector<Pose> robots;
    int score_a = 0;
    int score_b = 0;
};

struct TrajectoryLog {
    std::string controller_a;
    std::string controller_b;
    double tick_s = 0.035;
    int robot_count = 0;
    std::vector<LogRow> rows;
    int final_a = 0;
    int final_b = 0;

    void write(std::ostream& out) const {
        char buf[64];
        const auto num = [&](double v) {
            std::snprintf(buf, sizeof buf, "%.6f", v);
            return std::string(buf);
        };
        out << kLogVersionLine << '\n';
        out << "# teams A=" << controller_a << " B=" << controller_b
            << " robots=" << robot_count << " T=" << num(tick_s) << '\n';
        out << "tick,clock_s,event,ball_x,ball_y,ball_vx,ball_vy,"
               "obs_valid,obs_u,obs_v,obs_x,obs_y,"
               "est_x,est_y,est_vx,est_vy,pred_x,pred_y";
        for (int i = 0; i < robot_count; ++i) {
            out << ",r" << i << "_x,r" << i << "_y,r" << i << "_th";
        }
        out << ",score_a,score_b\n";
        for (const auto& r : rows) {
            out << r.tick << ',' << num(r.clock_s) << ',' << r.event << ',' << num(r.ball.x) << ','
                << num(r.ball.y) << ',' << num(r.ball_vel.x) << ',' << num(r.ball_vel.y) << ','
                << (r.obs_valid ? 1 : 0) << ',' << num(r.obs_u) << ',' << num(r.obs_v) << ','
                << num(r.obs_world.x) << ',' << num(r.obs_world.y) << ',' << num(r.est_pos.x) << ','
                << num(r.est_pos.y) << ',' << num(r.est_vel.x) << ',' << num(r.est_vel.y) << ','
                << num(r.pred.x) << ',' << num(r.pred.y);
            for (const auto& pose : r.robots) {
                out << ',' << num(pose.position.x) << ',' << num(pose.position.y) << ','
                    << num(pose.heading.degrees);
            }
            out << ',' << r.score_a << ',' << r.score_b << '\n';
        }
        out << "# final A=" << final_a << " B=" << final_b << '\n';
    }

    std::string to_string() const {
        std::ostringstream ss;
        write(ss);
        return ss.str();
    }

    static TrajectoryLog parse(std::istream& in) {
        TrajectoryLog log;
        std::string line;
        if (!std::getline(in, line) || line != kLogVersionLine) {
            throw config_error("trajectory log: missing or unsupported version line");
        }
        if (!std::getline(in, line) || line.rfind("# teams ", 0) != 0) {
            throw config_error("trajectory log: missing teams line");
        }
        {
            std::istringstream ss(line.substr(8));
            std::string tok;
            while (ss >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = tok.substr(0, eq);
                const std::string val = tok.substr(eq + 1);
                if (key == "A") log.controller_a = val;
                else if (key == "B") log.controller_b = val;
                else if (key == "robots") log.robot_count = std::stoi(val);
                else if (key == "T") log.tick_s = std::stod(val);
            }
        }
        if (!std::getline(in, line) || line.rfind("tick,", 0) != 0) {
            throw config_error("trajectory log: missing column header");
        }

        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (line.rfind("# final ", 0) == 0) {
                std::istringstream ss(line.substr(8));
                std::string tok;
                while (ss >> tok) {
                    const auto eq = tok.find('=');
                    if (eq == std::string::npos) continue;
                    if (tok.substr(0, eq) == "A") log.final_a = std::stoi(tok.substr(eq + 1));
                    if (tok.substr(0, eq) == "B") log.final_b = std::stoi(tok.substr(eq + 1));
                }
                continue;
            }
            std::vector<std::string> cells;
            std::string cell;
            std::istringstream ss(line);
            while (std::getline(ss, cell, ',')) cells.push_back(cell);
            const std::size_t expected = 18 + 3 * static_cast<std::size_t>(log.robot_count) + 2;
            if (cells.size() != expected) {
                throw config_error("trajectory log: row with " + std::to_string(cells.size()) +
                                   " cells, expected " + std::to_string(expected));
            }
            LogRow r;
            std::size_t k = 0;
            r.tick = std::stol(cells[k++]);
            r.clock_s = std::stod(cells[k++]);
            r.event = cells[k++];
            r.ball.x = std::stod(cells[k++]);
            r.ball.y = std::stod(cells[k++]);
            r.ball_vel.x = std::stod(cells[k++]);
            r.ball_vel.y = std::stod(cells[k++]);
            r.obs_valid = cells[k++] == "1";
            r.obs_u = std::stod(cells[k++]);
            r.obs_v = std::stod(cells[k++]);
            r.obs_world.x = std::stod(cells[k++]);
            r.obs_world.y = std::stod(cells[k++]);
            r.est_pos.x = std::stod(cells[k++]);
            r.est_pos.y = std::stod(cells[k++]);
            r.est_vel.x = std::stod(cells[k++]);
            r.est_vel.y = std::stod(cells[k++]);
            r.pred.x = std::stod(cells[k++]);
            r.pred.y = std::stod(cells[k++]);
            for (int i = 0; i < log.robot_count; ++i) {
                Pose p;
                p.position.x = std::stod(cells[k++]);
                p.position.y = std::stod(cells[k++]);
                p.heading.degrees = std::stod(cells[k++]);
                r.robots.push_back(p);
            }
            r.score_a = std::stoi(cells[k++]);
            r.score_b = std::stoi(cells[k++]);
            log.rows.push_back(std::move(r));
        }
        return log;
    }
};

struct LogVerification {
    bool ok = true;
    int goals_a = 0;
    int goals_b = 0;
    long ticks = 0;
    std::vector<std::string> problems;
};

/// Independent consistency pass over a log: contiguous ticks, clock = tick*T,
/// monotone scores, and a goal-event recount that must match both the score
/// columns and the final line.
inline LogVerification verify_log(const TrajectoryLog& log) {
    LogVerification v;
    v.ticks = static_cast<long>(log.rows.size());
    int prev_a = 0;
    int prev_b = 0;
    for (std::size_t i = 0; i < log.rows.size(); ++i) {
        const auto& r = log.rows[i];
        if (r.tick != static_cast<long>(i)) {
            v.problems.push_back("tick " + std::to_string(r.tick) + " out of sequence at row " +
                                 std::to_string(i));
            break;
        }
        if (std::abs(r.clock_s - (r.tick + 1) * log.tick_s) > 1e-5) {
            v.problems.push_back("clock mismatch at tick " + std::to_string(r.tick));
        }
        if (r.score_a < prev_a || r.score_b < prev_b) {
            v.problems.push_back("score decreased at tick " + std::to_string(r.tick));
        }
        prev_a = r.score_a;
        prev_b = r.score_b;

        std::istringstream ss(r.event);
        std::string tok;
        while (std::getline(ss, tok, ';')) {
            if (tok == "goal:A") ++v.goals_a;
            if (tok == "goal:B") ++v.goals_b;
        }
        if (r.score_a != v.goals_a || r.score_b != v.goals_b) {
            v.problems.push_back("score columns disagree with goal events at tick " +
                                 std::to_string(r.tick));
        }
    }
    if (v.goals_a != log.final_a || v.goals_b != log.final_b) {
        v.problems.push_back("final score line disagrees with goal event recount");
    }
    v.ok = v.problems.empty();
    return v;
}

} // namespace robosoc
