#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "riskloop/rng.hpp"

namespace riskloop::sim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Vec2&) const = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

struct SafetyParams {
    double reaction_time = 0.1;     // s
    double stop_time = 0.2;         // s
    double decel = 3.0;             // m/s^2
    double intrusion_margin = 0.2;  // m
};

// Protective separation distance for the speed-and-separation monitor:
// S = h_max*(T_r + T_s) + v*T_r + v^2/(2a) + C. Strictly increasing in v.
double protective_distance(double robot_speed, double human_speed_max,
                           const SafetyParams& params);

struct PerceptionParams {
    double p_min = 0.5;
    double p_max = 0.99;
    double luminance_mid = 200.0;  // lux at which p = (p_min + p_max)/2
    double steepness = 1.5;
    double period = 0.1;  // s between detector updates
};

// p(L) = p_min + (p_max - p_min) * sigmoid(k * (ln L - ln L_mid))
double detection_probability(double luminance, const PerceptionParams& params);

struct PerceptionState {
    Vec2 last_reported;
    bool last_detected = true;
};

struct PerceptionOutcome {
    bool detected = false;
    Vec2 reported;  // true position on detection, stale last detection on a miss
};

PerceptionOutcome perceive(Vec2 true_position, double luminance,
                           const PerceptionParams& params, Rng& rng,
                           PerceptionState& state);

struct ScenarioParams {
    Vec2 workspace{4.0, 3.0};
    std::vector<Vec2> robot_path;  // closed pick-place loop
    std::vector<Vec2> human_path;  // open polyline, traversed back and forth
    SafetyParams safety;
    PerceptionParams perception;
    double human_speed_max = 0.0;   // monitor's assumed operator speed; 0 = per-episode speed
    double human_clearance = 0.5;   // operator refuses to close in beyond this distance
    double control_margin = 0.05;   // slack between the zone and the braking trigger
    double step = 0.01;             // s
    double duration = 20.0;         // s
    std::string human_speed_feature = "human_speed";
    std::string robot_speed_feature = "robot_speed";
    std::string luminance_feature = "luminance";
};

ScenarioParams default_scenario();

class ScenarioError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Key-value scenario file; unknown keys are errors. See README for the key list.
ScenarioParams parse_scenario(std::string_view text);
ScenarioParams load_scenario(const std::string& path);

using FeatureValue = std::variant<double, std::string>;

struct EnvConfig {
    std::map<std::string, FeatureValue> values;
    std::uint64_t seed = 0;
};

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TraceSample {
    double time = 0.0;
    Vec2 human;
    Vec2 robot;
    double robot_speed = 0.0;
    double safety_zone = 0.0;
    double separation = 0.0;
    bool detected = true;
};

struct SimTrace {
    std::vector<TraceSample> samples;
    double min_separation = 0.0;
    std::optional<double> violation_time;  // first instant with separation < zone
    double detection_rate = 1.0;           // fraction of detector updates that hit
    double min_margin = 0.0;               // min over samples of separation - zone
};

// Deterministic episode: identical (config, scenario) give bit-identical traces.
SimTrace run_episode(const EnvConfig& config, const ScenarioParams& scenario);
SimTrace run_episode(const EnvConfig& config, double duration, double step,
                     const ScenarioParams& scenario);

std::vector<std::string> metric_registry();

// Summary value of a registered metric; violation_time resolves to +inf when
// the episode never violated.
double metric_value(const SimTrace& trace, const std::string& name);

std::string trace_csv(const SimTrace& trace);
std::string trace_summary_json(const SimTrace& trace);

}  // namespace riskloop::sim
