#include <algorithm>
#include <cmath>
#include <limits>

#include "riskloop/sim.hpp"

#include "riskloop/model.hpp"
#include "nlohmann/json.hpp"

namespace riskloop::sim {
namespace {

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument(std::string(what) + " must be finite");
    }
}

// Arc-length walk along a polyline: closed paths loop, open paths ping-pong.
class PathWalker {
public:
    PathWalker(const std::vector<Vec2>& points, bool closed) : points_(points), closed_(closed) {
        cumulative_.push_back(0.0);
        for (std::size_t i = 1; i < points_.size(); ++i) {
            cumulative_.push_back(cumulative_.back() + distance(points_[i - 1], points_[i]));
        }
        if (closed_ && points_.size() > 1) {
            cumulative_.push_back(cumulative_.back() + distance(points_.back(), points_.front()));
        }
        length_ = cumulative_.back();
    }

    Vec2 at(double s) const {
        if (points_.empty()) return {};
        if (points_.size() == 1 || length_ <= 0.0) return points_.front();
        double t = 0.0;
        if (closed_) {
            t = std::fmod(s, length_);
            if (t < 0.0) t += length_;
        } else {
            t = std::fmod(s, 2.0 * length_);
            if (t < 0.0) t += 2.0 * length_;
            if (t > length_) t = 2.0 * length_ - t;
        }
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), t);
        std::size_t seg = it == cumulative_.begin()
                              ? 0
                              : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
        seg = std::min(seg, cumulative_.size() - 2);
        const Vec2 a = points_[seg % points_.size()];
        const Vec2 b = points_[(seg + 1) % points_.size()];
        const double seg_len = cumulative_[seg + 1] - cumulative_[seg];
        const double frac = seg_len > 0.0 ? (t - cumulative_[seg]) / seg_len : 0.0;
        return a + frac * (b - a);
    }

private:
    std::vector<Vec2> points_;
    bool closed_;
    std::vector<double> cumulative_;
    double length_ = 0.0;
};

struct EpisodeInputs {
    double human_speed = 0.0;
    double robot_speed = 0.0;
    double luminance = 0.0;
};

double numeric_value(const EnvConfig& config, const std::string& key) {
    const auto it = config.values.find(key);
    if (it == config.values.end()) {
        throw ConfigError("config is missing feature \"" + key + "\"");
    }
    if (!std::holds_alternative<double>(it->second)) {
        throw ConfigError("feature \"" + key + "\" must be numeric");
    }
    return std::get<double>(it->second);
}

EpisodeInputs resolve_inputs(const EnvConfig& config, const ScenarioParams& scenario) {
    EpisodeInputs inputs;
    inputs.human_speed = numeric_value(config, scenario.human_speed_feature);
    inputs.robot_speed = numeric_value(config, scenario.robot_speed_feature);
    inputs.luminance = numeric_value(config, scenario.luminance_feature);
    if (!std::isfinite(inputs.human_speed) || inputs.human_speed < 0.0) {
        throw ConfigError("human speed must be finite and non-negative");
    }
    if (!std::isfinite(inputs.robot_speed) || inputs.robot_speed < 0.0) {
        throw ConfigError("robot speed must be finite and non-negative");
    }
    if (!std::isfinite(inputs.luminance) || inputs.luminance <= 0.0) {
        throw ConfigError("luminance must be finite and positive");
    }
    return inputs;
}

// Largest speed whose protective distance (plus the control margin) still fits
// into the perceived separation; the positive root of v^2/(2a) + v*T_r = room.
double allowed_speed(double perceived_separation, double human_speed_max,
                     const SafetyParams& safety, double control_margin) {
    const double base = human_speed_max * (safety.reaction_time + safety.stop_time) +
                        safety.intrusion_margin;
    const double room = perceived_separation - control_margin - base;
    if (room <= 0.0) return 0.0;
    const double a = safety.decel;
    const double tr = safety.reaction_time;
    return -a * tr + std::sqrt(a * a * tr * tr + 2.0 * a * room);
}

}  // namespace

double protective_distance(double robot_speed, double human_speed_max,
                           const SafetyParams& params) {
    require_finite(robot_speed, "robot_speed");
    require_finite(human_speed_max, "human_speed_max");
    if (robot_speed < 0.0 || human_speed_max < 0.0) {
        throw std::invalid_argument("speeds must be non-negative");
    }
    return human_speed_max * (params.reaction_time + params.stop_time) +
           robot_speed * params.reaction_time +
           robot_speed * robot_speed / (2.0 * params.decel) + params.intrusion_margin;
}

double detection_probability(double luminance, const PerceptionParams& params) {
    require_finite(luminance, "luminance");
    if (luminance <= 0.0) throw std::invalid_argument("luminance must be positive");
    const double z = params.steepness * (std::log(luminance) - std::log(params.luminance_mid));
    const double sigmoid = 1.0 / (1.0 + std::exp(-z));
    return params.p_min + (params.p_max - params.p_min) * sigmoid;
}

PerceptionOutcome perceive(Vec2 true_position, double luminance, const PerceptionParams& params,
                           Rng& rng, PerceptionState& state) {
    const double p = detection_probability(luminance, params);
    PerceptionOutcome outcome;
    outcome.detected = rng.bernoulli(p);
    if (outcome.detected) {
        state.last_reported = true_position;
    }
    state.last_detected = outcome.detected;
    outcome.reported = state.last_reported;
    return outcome;
}

ScenarioParams default_scenario() {
    ScenarioParams scenario;
    scenario.robot_path = {{1.2, 1.0}, {2.8, 1.0}, {2.8, 2.0}, {1.2, 2.0}};
    scenario.human_path = {{2.0, 0.3}, {2.0, 2.7}};
    return scenario;
}

SimTrace run_episode(const EnvConfig& config, double duration, double step,
                     const ScenarioParams& base) {
    ScenarioParams scenario = base;
    scenario.duration = duration;
    scenario.step = step;
    return run_episode(config, scenario);
}

SimTrace run_episode(const EnvConfig& config, const ScenarioParams& scenario) {
    if (!(scenario.step > 0.0) || !(scenario.duration > 0.0)) {
        throw std::invalid_argument("duration and step must be positive");
    }
    if (scenario.robot_path.empty() || scenario.human_path.empty()) {
        throw std::invalid_argument("scenario requires robot and human paths");
    }
    const EpisodeInputs inputs = resolve_inputs(config, scenario);
    // Zone sizing: either a fixed site-wide operator speed or, when the
    // scenario says 0, the speed rating of this episode's operator.
    const double human_speed_max =
        scenario.human_speed_max > 0.0 ? scenario.human_speed_max : inputs.human_speed;

    const double dt = scenario.step;
    const auto steps = static_cast<std::size_t>(std::llround(scenario.duration / dt));
    const PathWalker robot_path(scenario.robot_path, /*closed=*/true);
    const PathWalker human_path(scenario.human_path, /*closed=*/false);

    Rng rng(config.seed);
    const std::size_t draw_interval =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(scenario.perception.period / dt)));

    double robot_arc = 0.0;
    double human_arc = 0.0;
    Vec2 robot_pos = robot_path.at(0.0);
    Vec2 human_pos = human_path.at(0.0);
    double robot_speed = 0.0;  // ramps up from rest
    PerceptionState perception_state{human_pos, true};

    SimTrace trace;
    trace.samples.reserve(steps + 1);
    double min_separation = std::numeric_limits<double>::infinity();
    double min_margin = std::numeric_limits<double>::infinity();
    std::optional<double> violation_time;
    std::size_t draws = 0;
    std::size_t hits = 0;

    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * dt;
        if (k % draw_interval == 0) {
            const PerceptionOutcome outcome =
                perceive(human_pos, inputs.luminance, scenario.perception, rng, perception_state);
            ++draws;
            if (outcome.detected) ++hits;
        }
        const double separation = distance(human_pos, robot_pos);
        const double zone = protective_distance(robot_speed, human_speed_max, scenario.safety);
        trace.samples.push_back(
            {t, human_pos, robot_pos, robot_speed, zone, separation, perception_state.last_detected});
        min_separation = std::min(min_separation, separation);
        const double margin = separation - zone;
        min_margin = std::min(min_margin, margin);
        if (margin < 0.0 && !violation_time) violation_time = t;
        if (k == steps) break;

        // Control from the perceived separation (stale on missed detections).
        const double perceived = distance(perception_state.last_reported, robot_pos);
        const double target = std::min(
            inputs.robot_speed, allowed_speed(perceived, human_speed_max, scenario.safety,
                                              scenario.control_margin));
        const double dv = scenario.safety.decel * dt;
        robot_speed = std::clamp(target, robot_speed - dv, robot_speed + dv);
        robot_speed = std::clamp(robot_speed, 0.0, inputs.robot_speed);

        robot_arc += robot_speed * dt;
        const Vec2 robot_next = robot_path.at(robot_arc);

        // The operator walks the waypoint path but does not press in on the
        // robot: steps that would newly close below the clearance are skipped.
        const double human_arc_next = human_arc + inputs.human_speed * dt;
        const Vec2 human_next = human_path.at(human_arc_next);
        const double dist_next = distance(human_next, robot_pos);
        if (dist_next >= scenario.human_clearance || dist_next >= separation) {
            human_arc = human_arc_next;
            human_pos = human_next;
        }
        robot_pos = robot_next;
    }

    trace.min_separation = min_separation;
    trace.min_margin = min_margin;
    trace.violation_time = violation_time;
    trace.detection_rate = draws > 0 ? static_cast<double>(hits) / static_cast<double>(draws) : 1.0;
    return trace;
}

std::vector<std::string> metric_registry() {
    return {"min_separation", "detection_rate", "violation_time"};
}

double metric_value(const SimTrace& trace, const std::string& name) {
    if (name == "min_separation") return trace.min_separation;
    if (name == "detection_rate") return trace.detection_rate;
    if (name == "violation_time") {
        return trace.violation_time ? *trace.violation_time
                                    : std::numeric_limits<double>::infinity();
    }
    throw std::invalid_argument("unknown metric \"" + name + "\"");
}

std::string trace_csv(const SimTrace& trace) {
    std::string out =
        "time,human_x,human_y,robot_x,robot_y,robot_speed,safety_zone_radius,separation,"
        "perception_detected\n";
    for (const auto& s : trace.samples) {
        out += model::format_double(s.time) + "," + model::format_double(s.human.x) + "," +
               model::format_double(s.human.y) + "," + model::format_double(s.robot.x) + "," +
               model::format_double(s.robot.y) + "," + model::format_double(s.robot_speed) + "," +
               model::format_double(s.safety_zone) + "," + model::format_double(s.separation) +
               "," + (s.detected ? "1" : "0") + "\n";
    }
    return out;
}

std::string trace_summary_json(const SimTrace& trace) {
    nlohmann::json j;
    j["min_separation"] = trace.min_separation;
    if (trace.violation_time) {
        j["violation_time"] = *trace.violation_time;
    } else {
        j["violation_time"] = nullptr;
    }
    j["detection_rate"] = trace.detection_rate;
    return j.dump(2) + "\n";
}

}  // namespace riskloop::sim
