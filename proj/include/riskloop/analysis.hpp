#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "riskloop/model.hpp"

namespace riskloop::analysis {

using IndicatorValue = std::variant<bool, double>;

struct SituationAssessment {
    std::string situation;
    double activation = 0.0;  // in [0, 1]
    std::map<std::string, IndicatorValue> indicator_values;
};

// activation = product of indicator truth values (0/1) * feature_probability.
// Throws std::invalid_argument when an indicator value is missing or mistyped.
SituationAssessment assess_situation(const model::Situation& situation,
                                     const std::map<std::string, IndicatorValue>& values,
                                     double feature_probability);

// activation * conditional violation probability, clamped to [0, 1].
double event_likelihood(double activation, double conditional_violation_prob);

struct EventReport {
    std::string name;
    double likelihood = 0.0;
    double severity = 0.0;
    double exposure = 0.0;  // likelihood * severity
};

struct GoalReport {
    std::string name;
    double satisfaction = 1.0;
};

struct RiskReport {
    std::string model;
    std::vector<EventReport> events;  // sorted by name
    std::vector<GoalReport> goals;    // sorted by name
    std::vector<std::string> evidence;
};

// Goal satisfaction: each goal starts from the product over impacting events of
// (1 - likelihood * severity); AND nodes then take the min of their children,
// OR nodes the max. Events absent from the map use their stored likelihood.
// Throws std::invalid_argument on unknown event names or out-of-range values.
RiskReport propagate(const model::RiskModel& model,
                     const std::map<std::string, double>& event_likelihoods);

enum class ReportFormat { Json, Text };

std::string render_report(const RiskReport& report, ReportFormat format);

}  // namespace riskloop::analysis
