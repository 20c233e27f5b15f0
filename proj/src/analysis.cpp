#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <stdexcept>

#include "riskloop/analysis.hpp"

#include "nlohmann/json.hpp"

namespace riskloop::analysis {
namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

void require_unit_interval(double x, const char* what) {
    if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
    }
}

}  // namespace

SituationAssessment assess_situation(const model::Situation& situation,
                                     const std::map<std::string, IndicatorValue>& values,
                                     double feature_probability) {
    require_unit_interval(feature_probability, "feature_probability");
    SituationAssessment assessment;
    assessment.situation = situation.name;
    assessment.indicator_values = values;
    double activation = feature_probability;
    for (const auto& indicator : situation.indicators) {
        const auto it = values.find(indicator.name);
        if (it == values.end()) {
            throw std::invalid_argument("missing value for indicator \"" + indicator.name + "\"");
        }
        bool truth = false;
        if (std::holds_alternative<model::BooleanIndicator>(indicator.kind)) {
            if (!std::holds_alternative<bool>(it->second)) {
                throw std::invalid_argument("indicator \"" + indicator.name +
                                            "\" expects a boolean value");
            }
            truth = std::get<bool>(it->second);
        } else {
            const auto& threshold = std::get<model::ThresholdIndicator>(indicator.kind);
            if (!std::holds_alternative<double>(it->second)) {
                throw std::invalid_argument("indicator \"" + indicator.name +
                                            "\" expects a numeric value");
            }
            truth = model::compare(threshold.cmp, std::get<double>(it->second), threshold.bound);
        }
        if (!truth) activation = 0.0;
    }
    assessment.activation = clamp01(activation);
    return assessment;
}

double event_likelihood(double activation, double conditional_violation_prob) {
    require_unit_interval(activation, "activation");
    require_unit_interval(conditional_violation_prob, "conditional_violation_prob");
    return clamp01(activation * conditional_violation_prob);
}

RiskReport propagate(const model::RiskModel& model,
                     const std::map<std::string, double>& event_likelihoods) {
    for (const auto& [name, likelihood] : event_likelihoods) {
        if (!model.find_event(name)) {
            throw std::invalid_argument("unknown event \"" + name + "\"");
        }
        require_unit_interval(likelihood, "event likelihood");
    }

    auto likelihood_of = [&](const model::Event& event) {
        const auto it = event_likelihoods.find(event.name);
        return it != event_likelihoods.end() ? it->second : event.likelihood;
    };

    // Direct impact factor per goal: product of (1 - likelihood * severity).
    std::map<std::string, double> impact_factor;
    for (const auto& event : model.events) {
        const double likelihood = likelihood_of(event);
        for (const auto& impact : event.impacts) {
            double& factor = impact_factor.try_emplace(impact.goal, 1.0).first->second;
            factor *= 1.0 - clamp01(likelihood * impact.severity);
        }
    }

    std::map<std::string, std::vector<const model::Goal*>> children;
    for (const auto& goal : model.goals) {
        if (goal.refines) children[*goal.refines].push_back(&goal);
    }

    std::map<std::string, double> satisfaction;
    std::function<double(const model::Goal&)> eval = [&](const model::Goal& goal) -> double {
        const auto memo = satisfaction.find(goal.name);
        if (memo != satisfaction.end()) return memo->second;
        double combined = 1.0;
        const auto kids = children.find(goal.name);
        if (kids != children.end() && !kids->second.empty()) {
            combined = goal.refinement == model::Refinement::Or ? 0.0 : 1.0;
            for (const model::Goal* child : kids->second) {
                const double value = eval(*child);
                combined = goal.refinement == model::Refinement::Or ? std::max(combined, value)
                                                                    : std::min(combined, value);
            }
        }
        const auto factor = impact_factor.find(goal.name);
        const double result = clamp01((factor != impact_factor.end() ? factor->second : 1.0) * combined);
        satisfaction[goal.name] = result;
        return result;
    };

    RiskReport report;
    report.model = model.name;
    for (const auto& event : model.events) {
        const double likelihood = likelihood_of(event);
        const double severity = model::event_impact_severity(event);
        report.events.push_back({event.name, likelihood, severity, likelihood * severity});
        if (event.provenance) report.evidence.push_back(*event.provenance);
    }
    for (const auto& goal : model.goals) {
        report.goals.push_back({goal.name, eval(goal)});
    }
    std::sort(report.events.begin(), report.events.end(),
              [](const auto& a, const auto& b) { return a.name < b.name; });
    std::sort(report.goals.begin(), report.goals.end(),
              [](const auto& a, const auto& b) { return a.name < b.name; });
    std::sort(report.evidence.begin(), report.evidence.end());
    report.evidence.erase(std::unique(report.evidence.begin(), report.evidence.end()),
                          report.evidence.end());
    return report;
}

std::string render_report(const RiskReport& report, ReportFormat format) {
    if (format == ReportFormat::Json) {
        nlohmann::json j;
        j["model"] = report.model;
        j["events"] = nlohmann::json::array();
        for (const auto& event : report.events) {
            j["events"].push_back({{"name", event.name},
                                   {"likelihood", event.likelihood},
                                   {"severity", event.severity},
                                   {"exposure", event.exposure}});
        }
        j["goals"] = nlohmann::json::array();
        for (const auto& goal : report.goals) {
            j["goals"].push_back({{"name", goal.name}, {"satisfaction", goal.satisfaction}});
        }
        j["evidence"] = report.evidence;
        return j.dump(2) + "\n";
    }

    std::string out = "model: " + report.model + "\n\nevents\n";
    char line[160];
    std::snprintf(line, sizeof(line), "  %-34s %10s %10s %10s\n", "name", "likelihood", "severity",
                  "exposure");
    out += line;
    for (const auto& event : report.events) {
        std::snprintf(line, sizeof(line), "  %-34s %10.4f %10.4f %10.4f\n", event.name.c_str(),
                      event.likelihood, event.severity, event.exposure);
        out += line;
    }
    out += "\ngoals\n";
    std::snprintf(line, sizeof(line), "  %-34s %12s\n", "name", "satisfaction");
    out += line;
    for (const auto& goal : report.goals) {
        std::snprintf(line, sizeof(line), "  %-34s %12.4f\n", goal.name.c_str(), goal.satisfaction);
        out += line;
    }
    out += "\nevidence\n";
    if (report.evidence.empty()) out += "  (none)\n";
    for (const auto& id : report.evidence) out += "  " + id + "\n";
    return out;
}

}  // namespace riskloop::analysis
