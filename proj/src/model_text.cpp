#include <string>

#include "riskloop/model.hpp"

namespace riskloop::model {
namespace {

std::string quoted(const std::string& name) {
    std::string out = "\"";
    for (char c : name) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void append_unit(std::string& out, const std::string& unit) {
    if (!unit.empty()) {
        out += " ";
        out += unit;
    }
}

}  // namespace

std::string serialize_model(const RiskModel& model) {
    std::string out = "model " + quoted(model.name) + " {\n";
    for (const auto& situation : model.situations) {
        out += "  situation " + quoted(situation.name) + " {\n";
        for (const auto& indicator : situation.indicators) {
            out += "    indicator " + quoted(indicator.name) + ": ";
            if (std::holds_alternative<BooleanIndicator>(indicator.kind)) {
                out += "boolean";
            } else {
                const auto& threshold = std::get<ThresholdIndicator>(indicator.kind);
                out += to_string(threshold.cmp) + " " + format_double(threshold.bound);
                append_unit(out, threshold.unit);
            }
            out += "\n";
        }
        for (const auto& feature : situation.features) {
            out += "    feature " + quoted(feature.name) + ": ";
            if (const auto* cont = std::get_if<ContinuousDomain>(&feature.domain)) {
                out += "continuous [" + format_double(cont->lo) + ", " + format_double(cont->hi) + "]";
                append_unit(out, cont->unit);
            } else {
                const auto& disc = std::get<DiscreteDomain>(feature.domain);
                out += "discrete {";
                for (std::size_t i = 0; i < disc.categories.size(); ++i) {
                    if (i > 0) out += ", ";
                    out += quoted(disc.categories[i]);
                }
                out += "}";
            }
            out += "\n";
        }
        for (const auto& event : situation.exposes) {
            out += "    exposes " + quoted(event) + "\n";
        }
        out += "  }\n";
    }
    for (const auto& event : model.events) {
        out += "  event " + quoted(event.name) + " {\n";
        out += "    constraint: " + event.constraint.metric + " " + to_string(event.constraint.cmp) + " ";
        if (const auto* literal = std::get_if<LiteralBound>(&event.constraint.bound)) {
            out += format_double(literal->value);
            append_unit(out, literal->unit);
        } else {
            out += std::get<SymbolicBound>(event.constraint.bound).symbol;
        }
        out += "\n";
        out += "    likelihood " + format_double(event.likelihood) + "\n";
        for (const auto& impact : event.impacts) {
            out += "    impacts " + quoted(impact.goal) + " severity " + format_double(impact.severity) + "\n";
        }
        if (event.provenance) {
            out += "    evidence " + quoted(*event.provenance) + "\n";
        }
        out += "  }\n";
    }
    for (const auto& goal : model.goals) {
        out += "  goal " + quoted(goal.name) + " {\n";
        if (goal.refines) out += "    refines " + quoted(*goal.refines) + "\n";
        if (goal.refinement == Refinement::And) out += "    AND\n";
        if (goal.refinement == Refinement::Or) out += "    OR\n";
        out += "  }\n";
    }
    out += "}\n";
    return out;
}

}  // namespace riskloop::model
