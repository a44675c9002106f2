#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "robosoc/errors.hpp"
#include "robosoc/geometry.hpp"

// Fixed-gain g-h filter: smooths noisy ball observations and predicts the
// next-step position and velocity, one scalar filter per axis.

namespace robosoc {

/// Which recurrence update_and_predict runs.
///
/// standard:   the usual g-h form. Residual against the prediction, then the
///             prediction propagates the smoothed state by T * velocity.
/// as_printed: velocity and position are both corrected from the previous
///             smoothed values and the "prediction" carries no velocity
///             propagation term, so it can never lead a moving target. Kept
///             as a compatibility mode; tests pin the difference.
enum class GhMode { standard, as_printed };

struct FilterParams {
    double g = 0.5;
    double h = 0.3;
    double T = 0.035; // sample time, s

    /// Standard g-h stability region, checked at configuration time.
    bool valid() const {
        return std::isfinite(g) && std::isfinite(h) && std::isfinite(T) && g > 0.0 && g <= 1.0 &&
               h >= 0.0 && h <= 2.0 && h < 4.0 - 2.0 * g && T > 0.0;
    }
};

inline void validate(const FilterParams& p) {
    if (!p.valid()) {
        throw config_error("filter params outside stability region (need 0 < g <= 1, "
                           "0 <= h <= 2, h < 4 - 2g, T > 0)");
    }
}

/// Per-axis filter state: smoothed position/velocity and the one-step-ahead
/// prediction of both.
struct TrackEstimate {
    double x_hat = 0.0;  // smoothed position, mm
    double v_hat = 0.0;  // smoothed velocity, mm/s
    double x_pred = 0.0; // predicted position for the next sample, mm
    double v_pred = 0.0; // predicted velocity for the next sample, mm/s
};

inline TrackEstimate init_track(double z0) {
    if (!std::isfinite(z0)) {
        throw std::domain_error("init_track: non-finite measurement");
    }
    return TrackEstimate{z0, 0.0, z0, 0.0};
}

/// Advance the prediction with no measurement.
inline TrackEstimate coast(const TrackEstimate& s, const FilterParams& p) {
    TrackEstimate next;
    next.x_pred = s.x_pred + p.T * s.v_pred;
    next.v_pred = s.v_pred;
    next.x_hat = next.x_pred;
    next.v_hat = next.v_pred;
    return next;
}

/// One measurement update followed by the one-step prediction.
/// A non-finite measurement is rejected and the prediction coasts.
inline TrackEstimate update_and_predict(const TrackEstimate& s, double z, const FilterParams& p,
                                        GhMode mode = GhMode::standard) {
    validate(p);
    if (!std::isfinite(z)) {
        return coast(s, p);
    }
    TrackEstimate next;
    if (mode == GhMode::standard) {
        const double r = z - s.x_pred;
        next.x_hat = s.x_pred + p.g * r;
        next.v_hat = s.v_pred + p.h * r / p.T;
        next.x_pred = next.x_hat + p.T * next.v_hat;
        next.v_pred = next.v_hat;
    } else {
        const double r = z - s.x_hat;
        next.v_pred = s.v_hat + p.h * r / p.T;
        next.x_pred = s.x_hat + p.g * r;
        next.x_hat = next.x_pred;
        next.v_hat = next.v_pred;
    }
    return next;
}

/// Constant-velocity extrapolation k samples ahead of the smoothed state.
inline double predict_ahead(const TrackEstimate& s, int k, const FilterParams& p) {
    if (k < 1) {
        throw std::invalid_argument("predict_ahead: k must be >= 1");
    }
    return s.x_hat + k * p.T * s.v_hat;
}

/// Two independent scalar filters tracking the ball in world coordinates.
/// Missed observations coast the prediction; after max_coast consecutive
/// misses the track resets to uninitialized and re-acquires on the next hit.
class BallTracker {
public:
    BallTracker() = default;
    BallTracker(FilterParams params, GhMode mode, int max_coast = 15)
        : params_(params), mode_(mode), max_coast_(max_coast) {
        validate(params_);
    }

    bool initialized() const { return initialized_; }

    void observe(std::optional<Point2> measurement) {
        if (!measurement || !is_finite(*measurement)) {
            if (!initialized_) return;
            if (++misses_ > max_coast_) {
                reset();
                return;
            }
            x_ = coast(x_, params_);
            y_ = coast(y_, params_);
            return;
        }
        misses_ = 0;
        if (!initialized_) {
            x_ = init_track(measurement->x);
            y_ = init_track(measurement->y);
            initialized_ = true;
            return;
        }
        x_ = update_and_predict(x_, measurement->x, params_, mode_);
        y_ = update_and_predict(y_, measurement->y, params_, mode_);
    }

    void reset() {
        initialized_ = false;
        misses_ = 0;
        x_ = TrackEstimate{};
        y_ = TrackEstimate{};
    }

    Point2 position() const { return {x_.x_hat, y_.x_hat}; }
    Vec2 velocity() const { return {x_.v_hat, y_.v_hat}; }
    Point2 prediction() const { return {x_.x_pred, y_.x_pred}; }

    Point2 predict_point(int k) const {
        return {predict_ahead(x_, k, params_), predict_ahead(y_, k, params_)};
    }

    const TrackEstimate& axis_x() const { return x_; }
    const TrackEstimate& axis_y() const { return y_; }
    const FilterParams& params() const { return params_; }

private:
    FilterParams params_{};
    GhMode mode_ = GhMode::standard;
    int max_coast_ = 15;
    int misses_ = 0;
    bool initialized_ = false;
    TrackEstimate x_{};
    TrackEstimate y_{};
};

} // namespace robosoc
