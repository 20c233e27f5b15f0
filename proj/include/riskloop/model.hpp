#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace riskloop::model {

enum class Comparator { Less, LessEq, Greater, GreaterEq };

std::string to_string(Comparator cmp);
bool compare(Comparator cmp, double lhs, double rhs);

struct ContinuousDomain {
    double lo = 0.0;
    double hi = 1.0;
    std::string unit;  // empty when unitless
    bool operator==(const ContinuousDomain&) const = default;
};

struct DiscreteDomain {
    std::vector<std::string> categories;
    bool operator==(const DiscreteDomain&) const = default;
};

using FeatureDomain = std::variant<ContinuousDomain, DiscreteDomain>;

struct DomainFeature {
    std::string name;
    FeatureDomain domain;
    bool operator==(const DomainFeature&) const = default;
};

struct BooleanIndicator {
    bool operator==(const BooleanIndicator&) const = default;
};

struct ThresholdIndicator {
    Comparator cmp = Comparator::Less;
    double bound = 0.0;
    std::string unit;
    bool operator==(const ThresholdIndicator&) const = default;
};

using IndicatorKind = std::variant<BooleanIndicator, ThresholdIndicator>;

struct Indicator {
    std::string name;
    IndicatorKind kind;
    bool operator==(const Indicator&) const = default;
};

struct Situation {
    std::string name;
    std::vector<Indicator> indicators;
    std::vector<DomainFeature> features;
    std::vector<std::string> exposes;  // event names, declaration order
    bool operator==(const Situation&) const = default;
};

struct LiteralBound {
    double value = 0.0;
    std::string unit;
    bool operator==(const LiteralBound&) const = default;
};

struct SymbolicBound {
    std::string symbol;  // resolved per time step by the simulator
    bool operator==(const SymbolicBound&) const = default;
};

using ConstraintBound = std::variant<LiteralBound, SymbolicBound>;

struct Constraint {
    std::string metric;
    Comparator cmp = Comparator::Less;
    ConstraintBound bound;
    bool operator==(const Constraint&) const = default;
};

struct Impact {
    std::string goal;
    double severity = 1.0;
    bool operator==(const Impact&) const = default;
};

struct Event {
    std::string name;
    Constraint constraint;
    double likelihood = 0.5;  // uninformative prior until feedback arrives
    std::vector<Impact> impacts;
    std::optional<std::string> provenance;  // evidence id once feedback is applied
    bool operator==(const Event&) const = default;
};

enum class Refinement { Leaf, And, Or };

struct Goal {
    std::string name;
    std::optional<std::string> refines;  // parent goal
    Refinement refinement = Refinement::Leaf;
    bool operator==(const Goal&) const = default;
};

struct ExposesRelation {
    std::string situation;
    std::string event;
    bool operator==(const ExposesRelation&) const = default;
};

struct ImpactsRelation {
    std::string event;
    std::string goal;
    double severity = 1.0;
    bool operator==(const ImpactsRelation&) const = default;
};

struct RefinesRelation {
    std::string child;
    std::string parent;
    bool operator==(const RefinesRelation&) const = default;
};

using Relation = std::variant<ExposesRelation, ImpactsRelation, RefinesRelation>;

struct RiskModel {
    std::string name;
    std::vector<Situation> situations;
    std::vector<Event> events;
    std::vector<Goal> goals;

    bool operator==(const RiskModel&) const = default;

    const Situation* find_situation(std::string_view name) const;
    const Event* find_event(std::string_view name) const;
    const Goal* find_goal(std::string_view name) const;

    // Flat relation view in canonical order: exposes, then impacts, then refines.
    std::vector<Relation> relations() const;
};

// Worst declared impact severity of an event; 1.0 when no impact is declared.
double event_impact_severity(const Event& event);

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string message;
    std::string element;  // name of the offending element, may be empty
    int line = 0;         // 1-based, 0 when not tied to source text
    int column = 0;
};

std::string to_string(const Diagnostic& diag);
bool has_errors(const std::vector<Diagnostic>& diags);

struct ParseResult {
    std::optional<RiskModel> model;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return model.has_value(); }
};

// Parses the .rkml DSL. On success the model also passes the structural checks
// the parser can see (duplicate names, unresolved references, refinement cycles).
ParseResult parse_model(std::string_view text);

// Canonical text form; parse_model(serialize_model(m)) is structurally equal to m.
std::string serialize_model(const RiskModel& model);

// Full well-formedness check. Constraint metrics are verified against the
// given registry (see sim::metric_registry()).
std::vector<Diagnostic> validate(const RiskModel& model,
                                 const std::vector<std::string>& metric_registry);

// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);

}  // namespace riskloop::model
