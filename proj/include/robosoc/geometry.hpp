#pragma once

#include <cmath>
#include <stdexcept>

#include "robosoc/errors.hpp"

// Planar geometry shared by every module. Positions are millimetres,
// angles are degrees in the half-open interval (-180, +180].

namespace robosoc {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// An angle in degrees. Values produced by normalize_angle() lie in (-180, +180],
/// with +180 the canonical representative of the half-turn.
struct AngleDeg {
    double degrees = 0.0;
};

inline bool operator==(AngleDeg a, AngleDeg b) { return a.degrees == b.degrees; }

/// A point (or displacement) in the world plane, millimetres.
struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

using Vec2 = Point2; // velocities reuse the same representation, mm/s

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline bool operator==(Point2 a, Point2 b) { return a.x == b.x && a.y == b.y; }

inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

/// Wrap an angle into (-180, +180]. Idempotent; congruent to the input mod 360.
inline AngleDeg normalize_angle(double degrees) {
    if (!std::isfinite(degrees)) {
        throw std::domain_error("normalize_angle: non-finite angle");
    }
    double r = std::fmod(degrees, 360.0);
    if (r <= -180.0) {
        r += 360.0;
    } else if (r > 180.0) {
        r -= 360.0;
    }
    return AngleDeg{r};
}

inline AngleDeg normalize_angle(AngleDeg a) { return normalize_angle(a.degrees); }

/// Unit vector pointing along the given heading.
inline Vec2 heading_vector(AngleDeg a) {
    const double r = deg2rad(a.degrees);
    return {std::cos(r), std::sin(r)};
}

/// Euclidean distance in mm.
inline double distance(Point2 a, Point2 b) {
    if (!is_finite(a) || !is_finite(b)) {
        throw std::domain_error("distance: non-finite point");
    }
    return std::hypot(b.x - a.x, b.y - a.y);
}

/// Direction of the vector from -> to, measured from the +X axis, in (-180, +180].
/// Coincident points have no bearing; the caller decides the fallback.
inline AngleDeg bearing(Point2 from, Point2 to) {
    if (!is_finite(from) || !is_finite(to)) {
        throw std::domain_error("bearing: non-finite point");
    }
    if (from == to) {
        throw std::domain_error("bearing: coincident points");
    }
    return normalize_angle(rad2deg(std::atan2(to.y - from.y, to.x - from.x)));
}

} // namespace robosoc
