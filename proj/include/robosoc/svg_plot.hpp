#pragma once

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "robosoc/trajectory_log.hpp"
#include "robosoc/world.hpp"

// Self-contained SVG rendering of a trajectory log: field outline, goal
// mouths, ball path and one polyline per robot. No external plotting
// dependency.

namespace robosoc {

inline void write_trajectory_svg(std::ostream& out, const TrajectoryLog& log,
                                 const FieldSpec& field) {
    const double scale = 0.25; // px per mm
    const double pad = 40.0;
    const double w = field.length * scale + 2 * pad;
    const double h = field.width * scale + 2 * pad;
    char buf[128];
    const auto px = [&](double x) { return pad + x * scale; };
    // SVG y grows downward; flip so +Y is up in the plot.
    const auto py = [&](double y) { return pad + (field.width - y) * scale; };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                  "viewBox=\"0 0 %.0f %.0f\">\n",
                  w, h, w, h);
    out << buf;
    out << "<rect width=\"100%\" height=\"100%\" fill=\"#0a3d0a\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                  "stroke=\"white\" stroke-width=\"2\"/>\n",
                  px(0), py(field.width), field.length * scale, field.width * scale);
    out << buf;
    // Goal mouths.
    for (const double gx : {0.0, field.length}) {
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"yellow\" "
                      "stroke-width=\"5\"/>\n",
                      px(gx), py(field.mouth_low()), px(gx), py(field.mouth_high()));
        out << buf;
    }

    static const char* robot_colors[] = {"#4fc3f7", "#29b6f6", "#0288d1",
                                         "#ef5350", "#e53935", "#b71c1c"};
    const auto polyline = [&](const std::vector<Point2>& pts, const char* color, double width) {
        if (pts.size() < 2) return;
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
            << "\" points=\"";
        for (const auto& p : pts) {
            std::snprintf(buf, sizeof buf, "%.1f,%.1f ", px(p.x), py(p.y));
            out << buf;
        }
        out << "\"/>\n";
    };

    for (int i = 0; i < log.robot_count; ++i) {
        std::vector<Point2> pts;
        pts.reserve(log.rows.size());
        for (const auto& r : log.rows) pts.push_back(r.robots[i].position);
        polyline(pts, robot_colors[i % 6], 1.2);
    }
    {
        std::vector<Point2> pts;
        pts.reserve(log.rows.size());
        for (const auto& r : log.rows) pts.push_back(r.ball);
        polyline(pts, "#ffe082", 2.0);
    }
    // Goal markers.
    for (const auto& r : log.rows) {
        if (r.event.find("goal:") == std::string::npos) continue;
        std::snprintf(buf, sizeof buf,
                      "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"6\" fill=\"none\" stroke=\"yellow\" "
                      "stroke-width=\"2\"/>\n",
                      px(r.ball.x), py(r.ball.y));
        out << buf;
    }
    out << "</svg>\n";
}

} // namespace robosoc
