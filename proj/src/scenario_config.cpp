#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "riskloop/sim.hpp"

namespace riskloop::sim {
namespace {

std::string trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return std::string(s.substr(begin, end - begin));
}

std::vector<double> parse_numbers(const std::string& value, const std::string& key, int line) {
    std::vector<double> numbers;
    std::istringstream in(value);
    std::string token;
    while (in >> token) {
        char* end = nullptr;
        const double x = std::strtod(token.c_str(), &end);
        if (end == token.c_str() || *end != '\0' || !std::isfinite(x)) {
            throw ScenarioError("line " + std::to_string(line) + ": key \"" + key +
                                "\" expects numbers, got \"" + token + "\"");
        }
        numbers.push_back(x);
    }
    if (numbers.empty()) {
        throw ScenarioError("line " + std::to_string(line) + ": key \"" + key + "\" has no value");
    }
    return numbers;
}

double parse_number(const std::string& value, const std::string& key, int line) {
    const auto numbers = parse_numbers(value, key, line);
    if (numbers.size() != 1) {
        throw ScenarioError("line " + std::to_string(line) + ": key \"" + key +
                            "\" expects a single number");
    }
    return numbers.front();
}

std::vector<Vec2> parse_points(const std::string& value, const std::string& key, int line) {
    const auto numbers = parse_numbers(value, key, line);
    if (numbers.size() % 2 != 0) {
        throw ScenarioError("line " + std::to_string(line) + ": key \"" + key +
                            "\" expects x y pairs");
    }
    std::vector<Vec2> points;
    for (std::size_t i = 0; i < numbers.size(); i += 2) {
        points.push_back({numbers[i], numbers[i + 1]});
    }
    return points;
}

void check_positive(double x, const char* what) {
    if (!(x > 0.0)) throw ScenarioError(std::string(what) + " must be positive");
}

void check_path_in_workspace(const std::vector<Vec2>& path, Vec2 workspace, const char* what) {
    for (const Vec2& p : path) {
        if (p.x < 0.0 || p.y < 0.0 || p.x > workspace.x || p.y > workspace.y) {
            throw ScenarioError(std::string(what) + " leaves the workspace");
        }
    }
}

}  // namespace

ScenarioParams parse_scenario(std::string_view text) {
    ScenarioParams scenario = default_scenario();
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ScenarioError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "workspace") {
            const auto points = parse_points(value, key, line_no);
            if (points.size() != 1) {
                throw ScenarioError("workspace expects exactly two numbers (width height)");
            }
            scenario.workspace = points.front();
        } else if (key == "robot_path") {
            scenario.robot_path = parse_points(value, key, line_no);
        } else if (key == "human_path") {
            scenario.human_path = parse_points(value, key, line_no);
        } else if (key == "reaction_time") {
            scenario.safety.reaction_time = parse_number(value, key, line_no);
        } else if (key == "stop_time") {
            scenario.safety.stop_time = parse_number(value, key, line_no);
        } else if (key == "decel") {
            scenario.safety.decel = parse_number(value, key, line_no);
        } else if (key == "intrusion_margin") {
            scenario.safety.intrusion_margin = parse_number(value, key, line_no);
        } else if (key == "p_min") {
            scenario.perception.p_min = parse_number(value, key, line_no);
        } else if (key == "p_max") {
            scenario.perception.p_max = parse_number(value, key, line_no);
        } else if (key == "luminance_mid") {
            scenario.perception.luminance_mid = parse_number(value, key, line_no);
        } else if (key == "sigmoid_steepness") {
            scenario.perception.steepness = parse_number(value, key, line_no);
        } else if (key == "perception_period") {
            scenario.perception.period = parse_number(value, key, line_no);
        } else if (key == "human_speed_max") {
            scenario.human_speed_max = parse_number(value, key, line_no);
        } else if (key == "human_clearance") {
            scenario.human_clearance = parse_number(value, key, line_no);
        } else if (key == "control_margin") {
            scenario.control_margin = parse_number(value, key, line_no);
        } else if (key == "step") {
            scenario.step = parse_number(value, key, line_no);
        } else if (key == "duration") {
            scenario.duration = parse_number(value, key, line_no);
        } else if (key == "human_speed_feature") {
            scenario.human_speed_feature = value;
        } else if (key == "robot_speed_feature") {
            scenario.robot_speed_feature = value;
        } else if (key == "luminance_feature") {
            scenario.luminance_feature = value;
        } else {
            throw ScenarioError("line " + std::to_string(line_no) + ": unknown key \"" + key + "\"");
        }
    }

    check_positive(scenario.workspace.x, "workspace width");
    check_positive(scenario.workspace.y, "workspace height");
    check_positive(scenario.safety.reaction_time, "reaction_time");
    check_positive(scenario.safety.stop_time, "stop_time");
    check_positive(scenario.safety.decel, "decel");
    check_positive(scenario.safety.intrusion_margin, "intrusion_margin");
    if (scenario.human_speed_max < 0.0) {
        throw ScenarioError("human_speed_max must be non-negative (0 sizes zones per episode)");
    }
    check_positive(scenario.human_clearance, "human_clearance");
    check_positive(scenario.step, "step");
    check_positive(scenario.duration, "duration");
    check_positive(scenario.perception.period, "perception_period");
    if (scenario.control_margin < 0.0) throw ScenarioError("control_margin must be non-negative");
    if (scenario.perception.p_min < 0.0 || scenario.perception.p_max > 1.0 ||
        scenario.perception.p_min > scenario.perception.p_max) {
        throw ScenarioError("perception probabilities require 0 <= p_min <= p_max <= 1");
    }
    if (scenario.robot_path.empty() || scenario.human_path.empty()) {
        throw ScenarioError("scenario requires robot_path and human_path");
    }
    check_path_in_workspace(scenario.robot_path, scenario.workspace, "robot_path");
    check_path_in_workspace(scenario.human_path, scenario.workspace, "human_path");
    return scenario;
}

ScenarioParams load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot open scenario file \"" + path + "\"");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

}  // namespace riskloop::sim
