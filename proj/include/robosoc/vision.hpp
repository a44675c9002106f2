#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "robosoc/errors.hpp"
#include "robosoc/geometry.hpp"
#include "robosoc/world.hpp"

// Synthetic overhead camera and ball extraction: render the world to a binary
// "ball-colored" mask, search a dynamic window with block-seeded region
// growing, and map pixel coordinates to world coordinates through a bilinear
// least-squares calibration.

namespace robosoc {

/// Binary ball-color mask at camera resolution (default 620x480).
struct PixelFrame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> mask;

    PixelFrame() = default;
    PixelFrame(int w, int h) : width(w), height(h), mask(static_cast<std::size_t>(w) * h, 0) {}

    bool at(int u, int v) const { return mask[static_cast<std::size_t>(v) * width + u] != 0; }
    void set(int u, int v, bool on) {
        mask[static_cast<std::size_t>(v) * width + u] = on ? 1 : 0;
    }
    bool in_bounds(int u, int v) const { return u >= 0 && u < width && v >= 0 && v < height; }
};

/// Square search region around the last ball sighting, clipped to the frame.
struct DynamicWindow {
    int cu = 0;
    int cv = 0;
    int side = 0; // unclipped side, always odd
    int u0 = 0, v0 = 0, u1 = 0, v1 = 0; // clipped inclusive bounds

    int clipped_width() const { return u1 - u0 + 1; }
    int clipped_height() const { return v1 - v0 + 1; }
    bool contains(double u, double v) const { return u >= u0 && u <= u1 && v >= v0 && v <= v1; }
};

/// Window sized so a ball moving at most v_max_px for one sample period
/// cannot escape it: side = 2*r_ball + 2*ceil(v_max_px*T), rounded up to odd.
inline DynamicWindow window_for(double last_u, double last_v, int r_ball_px, double v_max_px,
                                double T, int frame_w, int frame_h) {
    if (T <= 0.0) {
        throw std::invalid_argument("window_for: T must be positive");
    }
    // epsilon guard so an exact reach (e.g. 200 px/s * 35 ms = 7) does not
    // round up through floating-point noise
    int side = 2 * r_ball_px + 2 * static_cast<int>(std::ceil(v_max_px * T - 1e-9));
    if (side % 2 == 0) ++side;
    DynamicWindow w;
    w.cu = static_cast<int>(std::lround(last_u));
    w.cv = static_cast<int>(std::lround(last_v));
    w.side = side;
    const int half = side / 2;
    w.u0 = std::max(0, w.cu - half);
    w.v0 = std::max(0, w.cv - half);
    w.u1 = std::min(frame_w - 1, w.cu + half);
    w.v1 = std::min(frame_h - 1, w.cv + half);
    w.u0 = std::min(w.u0, frame_w - 1);
    w.v0 = std::min(w.v0, frame_h - 1);
    w.u1 = std::max(w.u1, 0);
    w.v1 = std::max(w.v1, 0);
    return w;
}

inline DynamicWindow full_frame_window(int frame_w, int frame_h) {
    DynamicWindow w;
    w.cu = frame_w / 2;
    w.cv = frame_h / 2;
    w.side = std::max(frame_w, frame_h) | 1;
    w.u0 = 0;
    w.v0 = 0;
    w.u1 = frame_w - 1;
    w.v1 = frame_h - 1;
    return w;
}

/// Bilinear pixel-to-world map x = a0 + a1*u + a2*v + a3*u*v (same form for y
/// with the b coefficients), with the fit's RMS residual attached.
struct CalibrationMap {
    std::array<double, 4> a{};
    std::array<double, 4> b{};
    double rms_residual = 0.0;
};

inline Point2 pixel_to_world(const CalibrationMap& cal, double u, double v) {
    return {cal.a[0] + cal.a[1] * u + cal.a[2] * v + cal.a[3] * u * v,
            cal.b[0] + cal.b[1] * u + cal.b[2] * v + cal.b[3] * u * v};
}

/// Numerical inverse of the bilinear map (Newton from the affine-part guess).
/// Requires the calibration to be invertible near the query.
inline std::pair<double, double> world_to_pixel(const CalibrationMap& cal, Point2 world) {
    // Affine initial guess.
    const double det = cal.a[1] * cal.b[2] - cal.a[2] * cal.b[1];
    if (det == 0.0) {
        throw calibration_error("world_to_pixel: affine part singular");
    }
    const double rx = world.x - cal.a[0];
    const double ry = world.y - cal.b[0];
    double u = (cal.b[2] * rx - cal.a[2] * ry) / det;
    double v = (-cal.b[1] * rx + cal.a[1] * ry) / det;

    for (int it = 0; it < 25; ++it) {
        const Point2 p = pixel_to_world(cal, u, v);
        const double fx = p.x - world.x;
        const double fy = p.y - world.y;
        if (std::abs(fx) < 1e-9 && std::abs(fy) < 1e-9) return {u, v};
        const double j00 = cal.a[1] + cal.a[3] * v;
        const double j01 = cal.a[2] + cal.a[3] * u;
        const double j10 = cal.b[1] + cal.b[3] * v;
        const double j11 = cal.b[2] + cal.b[3] * u;
        const double jdet = j00 * j11 - j01 * j10;
        if (jdet == 0.0 || !std::isfinite(jdet)) {
            throw calibration_error("world_to_pixel: Jacobian singular");
        }
        u -= (j11 * fx - j01 * fy) / jdet;
        v -= (-j10 * fx + j00 * fy) / jdet;
    }
    const Point2 p = pixel_to_world(cal, u, v);
    if (std::abs(p.x - world.x) > 1e-6 || std::abs(p.y - world.y) > 1e-6) {
        throw calibration_error("world_to_pixel: Newton iteration did not converge");
    }
    return {u, v};
}

/// One calibration correspondence: pixel (u, v) against world (x, y).
struct Correspondence {
    double u = 0.0;
    double v = 0.0;
    double x = 0.0;
    double y = 0.0;
};

struct FitOptions {
    double max_rms_mm = 2.0; // reject fits worse than this
};

/// Least-squares fit of the bilinear map from >= 4 correspondences.
/// Columns are scaled before the QR solve so pixel magnitudes do not hurt
/// conditioning; rank deficiency reports the offending monomials.
inline CalibrationMap fit_calibration(const std::vector<Correspondence>& points,
                                      FitOptions opts = {}) {
    const auto n = points.size();
    if (n < 4) {
        throw calibration_error("fit_calibration: need at least 4 correspondences");
    }
    double su = 1.0, sv = 1.0;
    for (const auto& c : points) {
        su = std::max(su, std::abs(c.u));
        sv = std::max(sv, std::abs(c.v));
    }

    Eigen::MatrixXd design(n, 4);
    Eigen::VectorXd xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double un = points[i].u / su;
        const double vn = points[i].v / sv;
        design(i, 0) = 1.0;
        design(i, 1) = un;
        design(i, 2) = vn;
        design(i, 3) = un * vn;
        xs(i) = points[i].x;
        ys(i) = points[i].y;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < 4) {
        static const char* monomial[] = {"1", "u", "v", "u*v"};
        std::string missing;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index k = qr.rank(); k < 4; ++k) {
            if (!missing.empty()) missing += ", ";
            missing += monomial[perm(k)];
        }
        throw calibration_error("fit_calibration: design matrix rank deficient; "
                                "unresolvable monomial column(s): " + missing);
    }

    const Eigen::Vector4d ca = qr.solve(xs);
    const Eigen::Vector4d cb = qr.solve(ys);

    CalibrationMap cal;
    cal.a = {ca(0), ca(1) / su, ca(2) / sv, ca(3) / (su * sv)};
    cal.b = {cb(0), cb(1) / su, cb(2) / sv, cb(3) / (su * sv)};

    double ss = 0.0;
    for (const auto& c : points) {
        const Point2 p = pixel_to_world(cal, c.u, c.v);
        ss += (p.x - c.x) * (p.x - c.x) + (p.y - c.y) * (p.y - c.y);
    }
    cal.rms_residual = std::sqrt(ss / static_cast<double>(n));
    if (cal.rms_residual > opts.max_rms_mm) {
        throw calibration_error("fit_calibration: RMS residual " +
                                std::to_string(cal.rms_residual) + " mm exceeds tolerance");
    }
    return cal;
}

/// Parse "u v x y" lines; '#' starts a comment, blank lines are skipped.
inline std::vector<Correspondence> load_correspondences(std::istream& in) {
    std::vector<Correspondence> points;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        Correspondence c;
        if (ss >> c.u >> c.v >> c.x >> c.y) {
            double extra;
            if (ss >> extra) {
                throw calibration_error("correspondence file line " + std::to_string(line_no) +
                                        ": expected exactly 4 numbers");
            }
            points.push_back(c);
        } else if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) {
            throw calibration_error("correspondence file line " + std::to_string(line_no) +
                                    ": expected \"u v x y\"");
        }
    }
    return points;
}

/// Mask noise: each selected pixel flips. Seeded and deterministic.
struct PixelNoise {
    double rate = 0.0;
    std::uint64_t seed = 0;
};

struct RenderSpec {
    int width = 620;
    int height = 480;
    int ball_radius_px = 6;
};

namespace detail {

// splitmix64; stable across platforms, used for the noise stream.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d9b19fbf8b7595ULL;
    return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

} // namespace detail

/// Render the world as the camera would see it: the ball is a filled disc of
/// ball_radius_px at its projected position, robots overwrite the mask as
/// non-ball-colored, then salt-and-pepper noise flips pixels at the given rate.
inline PixelFrame render_frame(const WorldState& world, const CalibrationMap& cal,
                               PixelNoise noise = {}, RenderSpec spec = {}) {
    PixelFrame frame(spec.width, spec.height);

    // Ball disc, rasterized in pixel space.
    const auto [bu, bv] = world_to_pixel(cal, world.ball.position);
    const int r = spec.ball_radius_px;
    const int u_lo = std::max(0, static_cast<int>(std::floor(bu - r)));
    const int u_hi = std::min(spec.width - 1, static_cast<int>(std::ceil(bu + r)));
    const int v_lo = std::max(0, static_cast<int>(std::floor(bv - r)));
    const int v_hi = std::min(spec.height - 1, static_cast<int>(std::ceil(bv + r)));
    for (int v = v_lo; v <= v_hi; ++v) {
        for (int u = u_lo; u <= u_hi; ++u) {
            const double du = u - bu;
            const double dv = v - bv;
            if (du * du + dv * dv <= static_cast<double>(r) * r) {
                frame.set(u, v, true);
            }
        }
    }

    // Robots are not ball-colored; they erase any disc pixels they cover.
    for (const auto& robot : world.robots) {
        const double half = robot.half_size;
        const double cx = robot.pose.position.x;
        const double cy = robot.pose.position.y;
        const double cr = deg2rad(robot.pose.heading.degrees);
        const double c = std::cos(cr), s = std::sin(cr);
        int ru_lo = spec.width, ru_hi = -1, rv_lo = spec.height, rv_hi = -1;
        for (int corner = 0; corner < 4; ++corner) {
            const double lx = (corner & 1) ? half : -half;
            const double ly = (corner & 2) ? half : -half;
            const Point2 wc{cx + c * lx - s * ly, cy + s * lx + c * ly};
            const auto [cu, cv] = world_to_pixel(cal, wc);
            ru_lo = std::min(ru_lo, static_cast<int>(std::floor(cu)) - 1);
            ru_hi = std::max(ru_hi, static_cast<int>(std::ceil(cu)) + 1);
            rv_lo = std::min(rv_lo, static_cast<int>(std::floor(cv)) - 1);
            rv_hi = std::max(rv_hi, static_cast<int>(std::ceil(cv)) + 1);
        }
        ru_lo = std::max(ru_lo, 0);
        rv_lo = std::max(rv_lo, 0);
        ru_hi = std::min(ru_hi, spec.width - 1);
        rv_hi = std::min(rv_hi, spec.height - 1);
        for (int v = rv_lo; v <= rv_hi; ++v) {
            for (int u = ru_lo; u <= ru_hi; ++u) {
                if (!frame.at(u, v)) continue; // only ball pixels can change
                const Point2 w = pixel_to_world(cal, u, v);
                const double dx = w.x - cx;
                const double dy = w.y - cy;
                const double lx = c * dx + s * dy;
                const double ly = -s * dx + c * dy;
                if (std::abs(lx) <= half && std::abs(ly) <= half) {
                    frame.set(u, v, false);
                }
            }
        }
    }

    // Salt-and-pepper mask noise via geometric gap sampling.
    if (noise.rate > 0.0) {
        std::uint64_t state = noise.seed;
        const double p = std::min(noise.rate, 1.0);
        const double log1mp = std::log1p(-std::min(p, 1.0 - 1e-16));
        const std::size_t total = frame.mask.size();
        std::size_t idx = 0;
        while (true) {
            const double u01 = detail::uniform01(state);
            const auto gap = static_cast<std::size_t>(std::log1p(-u01) / log1mp);
            if (gap > total || idx + gap >= total) break;
            idx += gap;
            frame.mask[idx] ^= 1;
            ++idx;
        }
    }

    return frame;
}

/// Ball observation in pixel and world coordinates. world is meaningful only
/// when valid is set; extraction failure is encoded in the flag, not thrown.
struct BallObservation {
    double u = 0.0;
    double v = 0.0;
    Point2 world;
    bool valid = false;
};

/// Block-seeded region growing inside the dynamic window.
///
/// The window is tiled into blocks of side r_ball_px/4 (min 1). Every block
/// center that is ball-colored seeds a 4-connected flood fill; regions
/// touching the window border are discarded when an interior region exists;
/// the largest survivor's centroid becomes the observation. Fails (valid =
/// false) when nothing is found or the best region is under 10% of the
/// expected disc area.
inline BallObservation extract_ball(const PixelFrame& frame, const DynamicWindow& win,
                                    int r_ball_px) {
    BallObservation obs;
    if (win.u0 > win.u1 || win.v0 > win.v1) return obs;

    const int ww = win.clipped_width();
    const int wh = win.clipped_height();
    std::vector<std::uint8_t> visited(static_cast<std::size_t>(ww) * wh, 0);
    const auto visited_at = [&](int u, int v) -> std::uint8_t& {
        return visited[static_cast<std::size_t>(v - win.v0) * ww + (u - win.u0)];
    };

    struct Region {
        long count = 0;
        double sum_u = 0.0;
        double sum_v = 0.0;
        bool touches_border = false;
    };
    std::vector<Region> regions;
    std::vector<std::pair<int, int>> stack;

    const int block = std::max(1, r_ball_px / 4);
    for (int bv = win.v0; bv <= win.v1; bv += block) {
        for (int bu = win.u0; bu <= win.u1; bu += block) {
            const int seed_u = std::min(bu + block / 2, win.u1);
            const int seed_v = std::min(bv + block / 2, win.v1);
            if (!frame.at(seed_u, seed_v) || visited_at(seed_u, seed_v)) continue;

            Region region;
            stack.clear();
            stack.emplace_back(seed_u, seed_v);
            visited_at(seed_u, seed_v) = 1;
            while (!stack.empty()) {
                const auto [u, v] = stack.back();
                stack.pop_back();
                region.count += 1;
                region.sum_u += u;
                region.sum_v += v;
                if (u == win.u0 || u == win.u1 || v == win.v0 || v == win.v1) {
                    region.touches_border = true;
                }
                constexpr int du[] = {1, -1, 0, 0};
                constexpr int dv[] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    const int nu = u + du[k];
                    const int nv = v + dv[k];
                    if (nu < win.u0 || nu > win.u1 || nv < win.v0 || nv > win.v1) continue;
                    if (visited_at(nu, nv) || !frame.at(nu, nv)) continue;
                    visited_at(nu, nv) = 1;
                    stack.emplace_back(nu, nv);
                }
            }
            regions.push_back(region);
        }
    }

    if (regions.empty()) return obs;

    bool any_interior = false;
    for (const auto& r : regions) {
        if (!r.touches_border) {
            any_interior = true;
            break;
        }
    }

    const Region* best = nullptr;
    for (const auto& r : regions) {
        if (any_interior && r.touches_border) continue;
        if (!best || r.count > best->count) best = &r;
    }

    const double min_area = 0.1 * kPi * static_cast<double>(r_ball_px) * r_ball_px;
    if (!best || static_cast<double>(best->count) < min_area) return obs;

    obs.u = best->sum_u / static_cast<double>(best->count);
    obs.v = best->sum_v / static_cast<double>(best->count);
    obs.valid = true;
    return obs;
}

/// Where to look next: windows around the last sighting, doubling in size on
/// each consecutive miss until the whole frame is searched.
class BallLocator {
public:
    BallLocator(int r_ball_px, double v_max_px, double T)
        : r_ball_px_(r_ball_px), v_max_px_(v_max_px), T_(T) {}

    DynamicWindow next_window(int frame_w, int frame_h) const {
        if (!seen_) return full_frame_window(frame_w, frame_h);
        DynamicWindow w = window_for(last_u_, last_v_, r_ball_px_, v_max_px_, T_, frame_w, frame_h);
        if (misses_ > 0) {
            const int grown = w.side << std::min(misses_, 16);
            const int side = std::min(grown | 1, (2 * std::max(frame_w, frame_h)) | 1);
            w = window_for(last_u_, last_v_, side / 2, 0.0, T_, frame_w, frame_h);
        }
        return w;
    }

    void note(const BallObservation& obs) {
        if (obs.valid) {
            last_u_ = obs.u;
            last_v_ = obs.v;
            seen_ = true;
            misses_ = 0;
        } else if (seen_) {
            ++misses_;
        }
    }

    bool tracking() const { return seen_ && misses_ == 0; }

private:
    int r_ball_px_;
    double v_max_px_;
    double T_;
    double last_u_ = 0.0;
    double last_v_ = 0.0;
    bool seen_ = false;
    int misses_ = 0;
};

} // namespace robosoc
