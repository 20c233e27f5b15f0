#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "riskloop/model.hpp"

namespace riskloop::model {
namespace {

void error(std::vector<Diagnostic>& diags, std::string message, std::string element) {
    diags.push_back({Severity::Error, std::move(message), std::move(element)});
}

void warning(std::vector<Diagnostic>& diags, std::string message, std::string element) {
    diags.push_back({Severity::Warning, std::move(message), std::move(element)});
}

bool in_unit_interval(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

template <typename T>
void check_unique(std::vector<Diagnostic>& diags, const std::vector<T>& elements,
                  const char* kind) {
    std::set<std::string> seen;
    for (const auto& element : elements) {
        if (!seen.insert(element.name).second) {
            error(diags, std::string("duplicate ") + kind + " name", element.name);
        }
    }
}

}  // namespace

std::vector<Diagnostic> validate(const RiskModel& model,
                                 const std::vector<std::string>& metric_registry) {
    std::vector<Diagnostic> diags;

    check_unique(diags, model.situations, "situation");
    check_unique(diags, model.events, "event");
    check_unique(diags, model.goals, "goal");

    std::set<std::string> exposed;
    for (const auto& situation : model.situations) {
        if (situation.indicators.empty() && situation.features.empty()) {
            error(diags, "situation declares neither indicators nor features", situation.name);
        }
        std::set<std::string> feature_names;
        for (const auto& feature : situation.features) {
            if (!feature_names.insert(feature.name).second) {
                error(diags, "duplicate feature name in situation \"" + situation.name + "\"",
                      feature.name);
            }
            if (const auto* cont = std::get_if<ContinuousDomain>(&feature.domain)) {
                if (!std::isfinite(cont->lo) || !std::isfinite(cont->hi) || cont->lo >= cont->hi) {
                    error(diags, "continuous domain requires lo < hi", feature.name);
                }
            } else if (std::get<DiscreteDomain>(feature.domain).categories.empty()) {
                error(diags, "discrete domain is empty", feature.name);
            }
        }
        for (const auto& indicator : situation.indicators) {
            if (const auto* threshold = std::get_if<ThresholdIndicator>(&indicator.kind)) {
                if (!std::isfinite(threshold->bound)) {
                    error(diags, "threshold indicator requires a finite bound", indicator.name);
                }
            }
        }
        for (const auto& event : situation.exposes) {
            if (!model.find_event(event)) {
                error(diags, "exposes references unknown event \"" + event + "\"", situation.name);
            }
            exposed.insert(event);
        }
    }

    for (const auto& event : model.events) {
        if (!exposed.count(event.name)) {
            error(diags, "event not exposed by any situation", event.name);
        }
        if (!in_unit_interval(event.likelihood)) {
            error(diags, "event likelihood must lie in [0, 1]", event.name);
        }
        for (const auto& impact : event.impacts) {
            if (!model.find_goal(impact.goal)) {
                error(diags, "impacts references unknown goal \"" + impact.goal + "\"", event.name);
            }
            if (!in_unit_interval(impact.severity)) {
                error(diags, "impact severity must lie in [0, 1]", event.name);
            }
        }
        if (std::find(metric_registry.begin(), metric_registry.end(), event.constraint.metric) ==
            metric_registry.end()) {
            error(diags, "constraint metric \"" + event.constraint.metric + "\" is not registered",
                  event.name);
        }
        if (const auto* literal = std::get_if<LiteralBound>(&event.constraint.bound)) {
            if (!std::isfinite(literal->value)) {
                error(diags, "constraint bound must be finite", event.name);
            }
        }
    }

    std::map<std::string, int> child_count;
    for (const auto& goal : model.goals) {
        if (goal.refines) {
            if (!model.find_goal(*goal.refines)) {
                error(diags, "refines references unknown goal \"" + *goal.refines + "\"", goal.name);
            } else {
                ++child_count[*goal.refines];
            }
        }
    }
    for (const auto& goal : model.goals) {
        const int children = child_count.count(goal.name) ? child_count[goal.name] : 0;
        if (goal.refinement == Refinement::Leaf && children > 0) {
            error(diags, "leaf goal must not have children", goal.name);
        }
        if (goal.refinement != Refinement::Leaf && children == 0) {
            error(diags, "AND/OR goal requires at least one child", goal.name);
        }
    }
    // Cycle detection along parent pointers.
    std::map<std::string, int> state;  // 0 unvisited, 1 on stack, 2 done
    for (const auto& goal : model.goals) {
        const Goal* cur = &goal;
        std::vector<const Goal*> stack;
        while (cur && state[cur->name] == 0) {
            state[cur->name] = 1;
            stack.push_back(cur);
            cur = cur->refines ? model.find_goal(*cur->refines) : nullptr;
        }
        if (cur && state[cur->name] == 1) {
            error(diags, "cyclic refinement through goal \"" + cur->name + "\"", cur->name);
        }
        for (const Goal* g : stack) state[g->name] = 2;
    }

    if (model.events.empty()) {
        warning(diags, "model declares no events", model.name);
    }
    return diags;
}

}  // namespace riskloop::model
