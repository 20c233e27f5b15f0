#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "riskloop/model.hpp"
#include "riskloop/sim.hpp"

namespace riskloop::falsification {

struct Dimension {
    std::string name;
    model::FeatureDomain domain;
};

struct SearchSpace {
    std::vector<Dimension> dimensions;  // declaration order of the situation's features
    std::size_t size() const { return dimensions.size(); }
};

class SearchError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One dimension per domain feature of the situation, in declaration order.
// Throws SearchError on unknown situation or a situation without features.
SearchSpace build_search_space(const model::RiskModel& model, const std::string& situation);

// True when every config value exists in the space and lies inside its domain.
bool config_in_space(const SearchSpace& space, const sim::EnvConfig& config);

// Signed robustness margin of a trace against an event constraint; negative iff
// the constraint was violated at some step. For `min_separation` against the
// symbolic bound `safety_distance` this is min over steps of (separation - zone).
double objective(const sim::SimTrace& trace, const model::Constraint& constraint);

enum class Strategy { Random, Evolutionary };

Strategy strategy_from_name(const std::string& name);  // throws SearchError
std::string strategy_name(Strategy strategy);

struct Options {
    std::size_t budget = 100;
    Strategy strategy = Strategy::Random;
    std::uint64_t seed = 0;
    bool early_stop = false;
    unsigned workers = 0;  // 0 = hardware concurrency
};

struct EvalSummary {
    double min_separation = 0.0;
    std::optional<double> violation_time;
    double detection_rate = 1.0;
};

struct Sample {
    sim::EnvConfig config;
    double objective = 0.0;
    bool violated = false;
    EvalSummary summary;
};

struct FalsificationResult {
    std::string strategy;
    std::uint64_t seed = 0;
    std::size_t budget_used = 0;
    std::vector<Sample> samples;  // evaluation order
    std::size_t best_index = 0;   // most violating sample (min objective)

    const Sample& best() const { return samples.at(best_index); }
    std::size_t violation_count() const;
    std::string id() const;  // stable identifier used for evidence provenance
};

// Samples EnvConfigs from the situation's search space, runs one episode per
// sample and scores it against the event's constraint. `random` draws i.i.d.
// uniform; `evolutionary` is a generational GA (population 20, tournament 3,
// Gaussian mutation sigma = 10% of range, uniform crossover rate 0.5, elitism 1).
// Deterministic given (model, scenario, options) regardless of worker count.
FalsificationResult falsify(const model::RiskModel& model, const std::string& situation,
                            const std::string& event, const sim::ScenarioParams& scenario,
                            const Options& options);

// Fraction of n uniform samples whose episode violates the event's constraint.
double conditional_violation_prob(const model::RiskModel& model, const std::string& situation,
                                  const std::string& event, const sim::ScenarioParams& scenario,
                                  std::size_t n, std::uint64_t seed, unsigned workers = 0);

}  // namespace riskloop::falsification
