#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "robosoc/errors.hpp"
#include "robosoc/geometry.hpp"
#include "robosoc/world.hpp"

// Motion control: the proportional baseline, the forward/backward/turning
// sub-controllers, and the fuzzy rule base that blends them into one command.

namespace robosoc {

struct ControlGains {
    double k_d = 0.85;     // (mm/s) per mm of distance error
    double k_a = 0.12;     // (mm/s) per degree of heading error
    double k_a_turn = 0.2; // (mm/s) per degree, turning controller
    double v_max = 1000.0; // wheel clamp, mm/s

    bool valid() const { return k_d > 0.0 && k_a > 0.0 && k_a_turn > 0.0 && v_max > 0.0; }
};

/// Distance and angle errors between a robot posture and a target point.
struct ControlErrors {
    double d = 0.0;    // mm
    AngleDeg theta_t;  // bearing robot -> target, world frame
    AngleDeg theta_e;  // theta_t - heading, normalized
};

inline ControlErrors compute_errors(const Pose& robot, Point2 target) {
    ControlErrors e;
    e.d = distance(robot.position, target);
    if (e.d == 0.0) {
        e.theta_t = normalize_angle(robot.heading);
        e.theta_e = AngleDeg{0.0};
        return e;
    }
    e.theta_t = bearing(robot.position, target);
    e.theta_e = normalize_angle(e.theta_t.degrees - robot.heading.degrees);
    return e;
}

/// Proportional law: wheel speeds proportional to the distance error with a
/// differential correction for the heading error.
inline WheelCommand proportional_control(const ControlErrors& e, const ControlGains& g) {
    return clamp_command({g.k_d * e.d - g.k_a * e.theta_e.degrees,
                          g.k_d * e.d + g.k_a * e.theta_e.degrees},
                         g.v_max);
}

/// Forward sub-controller; same law as the proportional baseline, addressed
/// separately by the rule base.
inline WheelCommand forward_control(const ControlErrors& e, const ControlGains& g) {
    return proportional_control(e, g);
}

/// Backward sub-controller: the angle error is referenced to the robot's tail
/// and both wheels are negated, so the robot reverses toward targets behind it.
inline WheelCommand backward_control(const ControlErrors& e, const ControlGains& g) {
    const double theta_back = normalize_angle(e.theta_e.degrees - 180.0).degrees;
    const double vl = g.k_d * e.d + g.k_a * theta_back;
    const double vr = g.k_d * e.d - g.k_a * theta_back;
    return clamp_command({-vl, -vr}, g.v_max);
}

/// In-place rotation toward a desired heading.
inline WheelCommand turn_control(AngleDeg theta_r, AngleDeg theta_d, const ControlGains& g) {
    const double theta_e = normalize_angle(theta_d.degrees - theta_r.degrees).degrees;
    return clamp_command({-g.k_a_turn * theta_e, g.k_a_turn * theta_e}, g.v_max);
}

// ---------------------------------------------------------------------------
// Fuzzy blending
// ---------------------------------------------------------------------------

/// Piecewise-linear membership function. Families over one input variable are
/// built to sum to 1 everywhere (validated at construction).
struct Membership {
    enum class Shape { trapezoid, wrap_back };
    Shape shape = Shape::trapezoid;
    // trapezoid: 0 below a, rises a..b, 1 on b..c, falls c..d, 0 above.
    // wrap_back: rises from 0 at |x| = 180 - a to 1 at |x| = 180 (angles only).
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    double eval(double x) const {
        if (shape == Shape::wrap_back) {
            const double start = 180.0 - a;
            return std::clamp((std::abs(x) - start) / a, 0.0, 1.0);
        }
        if (x <= a || x >= d) {
            if (x == a && a == b) return 1.0; // degenerate left shoulder edge
            return 0.0;
        }
        if (x < b) return (x - a) / (b - a);
        if (x <= c) return 1.0;
        return (d - x) / (d - c);
    }
};

enum class FuzzyInput : int { d = 0, theta_e = 1, theta_r = 2, theta_t = 3 };
inline constexpr int kFuzzyInputs = 4;

inline std::string_view fuzzy_input_name(FuzzyInput v) {
    switch (v) {
    case FuzzyInput::d: return "d";
    case FuzzyInput::theta_e: return "theta_e";
    case FuzzyInput::theta_r: return "theta_r";
    case FuzzyInput::theta_t: return "theta_T";
    }
    return "?";
}

enum class RuleAction { forward, backward, turn, stop };

/// One rule row: optional label per input (unset = wildcard) and the
/// sub-controller it delegates to. Turn rows rotate to the commanded
/// target heading.
struct FuzzyRule {
    std::array<int, kFuzzyInputs> label{-1, -1, -1, -1};
    RuleAction action = RuleAction::stop;
};

/// The fuzzy input partition plus the rule rows, loadable from text.
class FuzzyTable {
public:
    struct LabeledMembership {
        std::string label;
        Membership fn;
    };

    static FuzzyTable from_text(const std::string& text);
    static const FuzzyTable& defaults();

    const std::vector<FuzzyRule>& rules() const { return rules_; }
    const std::vector<LabeledMembership>& family(FuzzyInput v) const {
        return families_[static_cast<int>(v)];
    }

    /// Membership vector of one input value over a family.
    void memberships(FuzzyInput v, double x, std::vector<double>& out) const {
        const auto& fam = families_[static_cast<int>(v)];
        out.resize(fam.size());
        for (std::size_t i = 0; i < fam.size(); ++i) out[i] = fam[i].fn.eval(x);
    }

private:
    void validate() const;
    std::array<std::vector<LabeledMembership>, kFuzzyInputs> families_;
    std::vector<FuzzyRule> rules_;
};

// Default partition and the 26-row rule table. Distances in mm, angles in
// degrees. The theta_T factor splits the far rows into the bearing sectors
// the rule text names; rows 25/26 are the "heading and bearing both opposite"
// shortcut, which drives forward instead of turning first.
inline constexpr const char* kDefaultFuzzyTableText = R"(# robosoc fuzzy control table
# variables: d (mm), theta_e, theta_r, theta_T (degrees, (-180, 180])
var d Near lshoulder 4 12
var d Far rshoulder 4 12

var theta_e Zero tri -30 0 30
var theta_e FrontLeft trap 0 30 60 90
var theta_e FrontRight trap -90 -60 -30 0
var theta_e BackLeft rshoulder 60 90
var theta_e BackRight lshoulder -90 -60

var theta_r Zero tri -30 0 30
var theta_r Left trap 0 30 150 180
var theta_r Right trap -180 -150 -30 0
var theta_r Back wrapback 30

var theta_T Zero tri -30 0 30
var theta_T Left trap 0 30 150 180
var theta_T Right trap -180 -150 -30 0
var theta_T Back wrapback 30

# near the target: rotate in place to the commanded heading, hold when aligned
rule Near * Left * => Turn
rule Near * Right * => Turn
rule Near * Back * => Turn
rule Near * Zero * => Stop

# away from the target: drive at it, reversing when it lies behind
rule Far Zero * Zero => Forward
rule Far Zero * Left => Forward
rule Far Zero * Right => Forward
rule Far Zero * Back => Forward
rule Far FrontLeft * Zero => Forward
rule Far FrontLeft * Left => Forward
rule Far FrontLeft * Right => Forward
rule Far FrontLeft * Back => Forward
rule Far FrontRight * Zero => Forward
rule Far FrontRight * Left => Forward
rule Far FrontRight * Right => Forward
rule Far FrontRight * Back => Forward
rule Far BackLeft * Zero => Backward
rule Far BackLeft * Left => Backward
rule Far BackLeft * Right => Backward
rule Far BackLeft * Back => Backward
rule Far BackRight * Zero => Backward
rule Far BackRight * Left => Backward
rule Far BackRight * Right => Backward
rule Far BackRight * Back => Backward

# facing away from the desired heading with the target dead astern: go forward
rule Near * Back Back => Forward
rule Far * Back Back => Forward
)";

inline FuzzyTable FuzzyTable::from_text(const std::string& text) {
    FuzzyTable table;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    const auto fail = [&](const std::string& why) {
        throw config_error("fuzzy table line " + std::to_string(line_no) + ": " + why);
    };

    const auto input_index = [](const std::string& name) -> int {
        for (int i = 0; i < kFuzzyInputs; ++i) {
            if (name == fuzzy_input_name(static_cast<FuzzyInput>(i))) return i;
        }
        return -1;
    };

    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string word;
        if (!(ss >> word)) continue;

        if (word == "var") {
            std::string var_name, label, shape;
            if (!(ss >> var_name >> label >> shape)) fail("expected: var <input> <label> <shape> ...");
            const int vi = input_index(var_name);
            if (vi < 0) fail("unknown input variable '" + var_name + "'");
            Membership fn;
            constexpr double kInf = 1e300;
            if (shape == "tri") {
                double a, b, c;
                if (!(ss >> a >> b >> c)) fail("tri needs 3 breakpoints");
                fn = {Membership::Shape::trapezoid, a, b, b, c};
            } else if (shape == "trap") {
                double a, b, c, d;
                if (!(ss >> a >> b >> c >> d)) fail("trap needs 4 breakpoints");
                fn = {Membership::Shape::trapezoid, a, b, c, d};
            } else if (shape == "lshoulder") {
                double c, d;
                if (!(ss >> c >> d)) fail("lshoulder needs 2 breakpoints");
                fn = {Membership::Shape::trapezoid, -kInf, -kInf, c, d};
            } else if (shape == "rshoulder") {
                double a, b;
                if (!(ss >> a >> b)) fail("rshoulder needs 2 breakpoints");
                fn = {Membership::Shape::trapezoid, a, b, kInf, kInf};
            } else if (shape == "wrapback") {
                double m;
                if (!(ss >> m)) fail("wrapback needs 1 breakpoint");
                if (m <= 0.0) fail("wrapback width must be positive");
                fn = {Membership::Shape::wrap_back, m, 0, 0, 0};
            } else {
                fail("unknown shape '" + shape + "'");
            }
            for (const auto& existing : table.families_[vi]) {
                if (existing.label == label) fail("duplicate label '" + label + "'");
            }
            table.families_[vi].push_back({label, fn});
        } else if (word == "rule") {
            FuzzyRule rule;
            for (int vi = 0; vi < kFuzzyInputs; ++vi) {
                std::string label;
                if (!(ss >> label)) fail("rule needs 4 antecedent labels (or *)");
                if (label == "*") continue;
                const auto& fam = table.families_[vi];
                int idx = -1;
                for (std::size_t k = 0; k < fam.size(); ++k) {
                    if (fam[k].label == label) idx = static_cast<int>(k);
                }
                if (idx < 0) {
                    fail("label '" + label + "' not defined for input '" +
                         std::string(fuzzy_input_name(static_cast<FuzzyInput>(vi))) + "'");
                }
                rule.label[vi] = idx;
            }
            std::string arrow, action;
            if (!(ss >> arrow >> action) || arrow != "=>") fail("expected '=> <action>'");
            if (action == "Forward") rule.action = RuleAction::forward;
            else if (action == "Backward") rule.action = RuleAction::backward;
            else if (action == "Turn") rule.action = RuleAction::turn;
            else if (action == "Stop") rule.action = RuleAction::stop;
            else fail("unknown action '" + action + "'");
            table.rules_.push_back(rule);
        } else {
            fail("expected 'var' or 'rule'");
        }
    }

    table.validate();
    return table;
}

inline void FuzzyTable::validate() const {
    for (int vi = 0; vi < kFuzzyInputs; ++vi) {
        const auto& fam = families_[vi];
        const std::string name(fuzzy_input_name(static_cast<FuzzyInput>(vi)));
        if (fam.empty()) {
            throw config_error("fuzzy table: no membership functions for input '" + name + "'");
        }
        const bool is_angle = vi != static_cast<int>(FuzzyInput::d);
        const double lo = is_angle ? -179.875 : 0.0;
        const double hi = is_angle ? 180.0 : 4000.0;
        const double step = is_angle ? 0.125 : 0.5;
        for (double x = lo; x <= hi + 1e-12; x += step) {
            double sum = 0.0;
            for (const auto& m : fam) {
                const double mu = m.fn.eval(x);
                if (mu < -1e-12 || mu > 1.0 + 1e-12) {
                    throw config_error("fuzzy table: membership of '" + name + "/" + m.label +
                                       "' leaves [0,1]");
                }
                sum += mu;
            }
            if (std::abs(sum - 1.0) > 1e-6) {
                throw config_error("fuzzy table: memberships of '" + name +
                                   "' do not sum to 1 at " + std::to_string(x));
            }
        }
    }
    if (rules_.empty()) {
        throw config_error("fuzzy table: no rules");
    }
    // Completeness: each partition sums to 1, so it suffices that some rule
    // fires on a coarse input grid.
    static constexpr double d_grid[] = {0, 2, 4, 8, 12, 20, 100, 1000};
    std::vector<double> mu[kFuzzyInputs];
    for (double dval : d_grid) {
        memberships(FuzzyInput::d, dval, mu[0]);
        for (double te = -180.0; te <= 180.0; te += 15.0) {
            memberships(FuzzyInput::theta_e, te, mu[1]);
            for (double tr = -180.0; tr <= 180.0; tr += 15.0) {
                memberships(FuzzyInput::theta_r, tr, mu[2]);
                for (double tt = -180.0; tt <= 180.0; tt += 15.0) {
                    memberships(FuzzyInput::theta_t, tt, mu[3]);
                    double total = 0.0;
                    for (const auto& rule : rules_) {
                        double w = 1.0;
                        for (int vi = 0; vi < kFuzzyInputs; ++vi) {
                            if (rule.label[vi] >= 0) w *= mu[vi][rule.label[vi]];
                        }
                        total += w;
                    }
                    if (total <= 1e-9) {
                        throw config_error("fuzzy table: no rule fires at d=" + std::to_string(dval) +
                                           " theta_e=" + std::to_string(te) +
                                           " theta_r=" + std::to_string(tr) +
                                           " theta_T=" + std::to_string(tt));
                    }
                }
            }
        }
    }
}

inline const FuzzyTable& FuzzyTable::defaults() {
    static const FuzzyTable table = FuzzyTable::from_text(kDefaultFuzzyTableText);
    return table;
}

/// Blend the sub-controllers through the rule base: every rule fires with the
/// product of its antecedent memberships and the output is the weight-averaged
/// wheel command of the fired rules, clamped to the wheel limit.
inline WheelCommand fuzzy_control(const Pose& robot, Point2 target, AngleDeg target_heading,
                                  const FuzzyTable& table, const ControlGains& gains) {
    const ControlErrors e = compute_errors(robot, target);
    const double theta_r = normalize_angle(target_heading.degrees - robot.heading.degrees).degrees;

    thread_local std::vector<double> mu[kFuzzyInputs];
    table.memberships(FuzzyInput::d, e.d, mu[0]);
    table.memberships(FuzzyInput::theta_e, e.theta_e.degrees, mu[1]);
    table.memberships(FuzzyInput::theta_r, theta_r, mu[2]);
    table.memberships(FuzzyInput::theta_t, e.theta_t.degrees, mu[3]);

    std::array<std::optional<WheelCommand>, 4> cache;
    const auto action_command = [&](RuleAction action) -> WheelCommand {
        auto& slot = cache[static_cast<int>(action)];
        if (!slot) {
            switch (action) {
            case RuleAction::forward: slot = forward_control(e, gains); break;
            case RuleAction::backward: slot = backward_control(e, gains); break;
            case RuleAction::turn: slot = turn_control(robot.heading, target_heading, gains); break;
            case RuleAction::stop: slot = WheelCommand{0.0, 0.0}; break;
            }
        }
        return *slot;
    };

    double total = 0.0;
    double vl = 0.0;
    double vr = 0.0;
    for (const auto& rule : table.rules()) {
        double w = 1.0;
        for (int vi = 0; vi < kFuzzyInputs && w > 0.0; ++vi) {
            if (rule.label[vi] >= 0) w *= mu[vi][rule.label[vi]];
        }
        if (w <= 0.0) continue;
        const WheelCommand cmd = action_command(rule.action);
        total += w;
        vl += w * cmd.v_left;
        vr += w * cmd.v_right;
    }
    if (total <= 0.0) {
        throw contract_error("fuzzy_control: no rule fired (table incomplete)");
    }
    return clamp_command({vl / total, vr / total}, gains.v_max);
}

} // namespace robosoc
