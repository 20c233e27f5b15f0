#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "riskloop/model.hpp"

namespace riskloop::model {

std::string to_string(Comparator cmp) {
    switch (cmp) {
        case Comparator::Less: return "<";
        case Comparator::LessEq: return "<=";
        case Comparator::Greater: return ">";
        case Comparator::GreaterEq: return ">=";
    }
    return "<";
}

bool compare(Comparator cmp, double lhs, double rhs) {
    switch (cmp) {
        case Comparator::Less: return lhs < rhs;
        case Comparator::LessEq: return lhs <= rhs;
        case Comparator::Greater: return lhs > rhs;
        case Comparator::GreaterEq: return lhs >= rhs;
    }
    return false;
}

const Situation* RiskModel::find_situation(std::string_view name) const {
    for (const auto& s : situations) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

const Event* RiskModel::find_event(std::string_view name) const {
    for (const auto& e : events) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

const Goal* RiskModel::find_goal(std::string_view name) const {
    for (const auto& g : goals) {
        if (g.name == name) return &g;
    }
    return nullptr;
}

std::vector<Relation> RiskModel::relations() const {
    std::vector<Relation> out;
    for (const auto& s : situations) {
        for (const auto& e : s.exposes) out.push_back(ExposesRelation{s.name, e});
    }
    for (const auto& e : events) {
        for (const auto& i : e.impacts) out.push_back(ImpactsRelation{e.name, i.goal, i.severity});
    }
    for (const auto& g : goals) {
        if (g.refines) out.push_back(RefinesRelation{g.name, *g.refines});
    }
    return out;
}

double event_impact_severity(const Event& event) {
    double severity = event.impacts.empty() ? 1.0 : 0.0;
    for (const auto& impact : event.impacts) severity = std::max(severity, impact.severity);
    return severity;
}

std::string to_string(const Diagnostic& diag) {
    std::string out = diag.severity == Severity::Error ? "error: " : "warning: ";
    out += diag.message;
    if (!diag.element.empty()) {
        out += " [";
        out += diag.element;
        out += "]";
    }
    if (diag.line > 0) {
        char loc[48];
        std::snprintf(loc, sizeof(loc), " (line %d, column %d)", diag.line, diag.column);
        out += loc;
    }
    return out;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string format_double(double value) {
    char buf[40];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return buf;
}

}  // namespace riskloop::model
