#pragma once

// Test-only generator of random valid risk models for round-trip and
// validation properties, plus the seeded defect catalog.

#include <string>
#include <vector>

#include "riskloop/model.hpp"
#include "riskloop/rng.hpp"
#include "riskloop/sim.hpp"

namespace riskloop::testgen {

inline std::string random_name(Rng& rng, const std::string& prefix, std::size_t index) {
    static const std::vector<std::string> words = {
        "distance", "speed",  "luminance", "contact", "operator", "conveyor",
        "bucket",   "sorting", "zone",     "\"quoted\"", "back\\slash", "l\xc3\xa4rm",
    };
    std::string name = prefix + " " + std::to_string(index);
    const std::size_t extra = rng.index(3);
    for (std::size_t i = 0; i < extra; ++i) {
        name += " " + words[rng.index(words.size())];
    }
    return name;
}

inline std::string random_unit(Rng& rng) {
    static const std::vector<std::string> units = {"", "m", "s", "m/s", "lux", "m/s^2"};
    return units[rng.index(units.size())];
}

inline model::Comparator random_cmp(Rng& rng) {
    switch (rng.index(4)) {
        case 0: return model::Comparator::Less;
        case 1: return model::Comparator::LessEq;
        case 2: return model::Comparator::Greater;
        default: return model::Comparator::GreaterEq;
    }
}

inline model::RiskModel random_model(Rng& rng) {
    model::RiskModel m;
    m.name = random_name(rng, "model", rng.index(1000));

    const std::size_t n_goals = rng.index(5);
    for (std::size_t g = 0; g < n_goals; ++g) {
        model::Goal goal;
        goal.name = random_name(rng, "goal", g);
        if (g > 0 && rng.bernoulli(0.6)) {
            goal.refines = m.goals[rng.index(g)].name;  // earlier goal: acyclic by construction
        }
        m.goals.push_back(goal);
    }
    // Goals with children must carry an operator, childless goals must not.
    for (auto& goal : m.goals) {
        bool has_child = false;
        for (const auto& other : m.goals) {
            if (other.refines && *other.refines == goal.name) has_child = true;
        }
        goal.refinement = has_child
                              ? (rng.bernoulli(0.5) ? model::Refinement::And : model::Refinement::Or)
                              : model::Refinement::Leaf;
    }

    const auto metrics = sim::metric_registry();
    const std::size_t n_events = rng.index(4);
    for (std::size_t e = 0; e < n_events; ++e) {
        model::Event event;
        event.name = random_name(rng, "event", e);
        event.constraint.metric = metrics[rng.index(metrics.size())];
        if (event.constraint.metric == "min_separation" && rng.bernoulli(0.5)) {
            event.constraint.cmp =
                rng.bernoulli(0.5) ? model::Comparator::Less : model::Comparator::LessEq;
            event.constraint.bound = model::SymbolicBound{"safety_distance"};
        } else {
            event.constraint.cmp = random_cmp(rng);
            event.constraint.bound = model::LiteralBound{rng.uniform(0.0, 5.0), random_unit(rng)};
        }
        event.likelihood = rng.uniform();
        const std::size_t n_impacts = m.goals.empty() ? 0 : rng.index(3);
        for (std::size_t i = 0; i < n_impacts && i < m.goals.size(); ++i) {
            const auto& goal = m.goals[rng.index(m.goals.size())].name;
            bool seen = false;
            for (const auto& impact : event.impacts) seen = seen || impact.goal == goal;
            if (!seen) event.impacts.push_back({goal, rng.uniform()});
        }
        if (rng.bernoulli(0.2)) event.provenance = "evidence-" + std::to_string(rng.index(100));
        m.events.push_back(event);
    }

    const std::size_t n_situations = std::max<std::size_t>(m.events.empty() ? 0 : 1, rng.index(4));
    for (std::size_t s = 0; s < n_situations; ++s) {
        model::Situation situation;
        situation.name = random_name(rng, "situation", s);
        const std::size_t n_indicators = rng.index(3);
        for (std::size_t i = 0; i < n_indicators; ++i) {
            model::Indicator indicator;
            indicator.name = random_name(rng, "indicator", i);
            if (rng.bernoulli(0.5)) {
                indicator.kind = model::BooleanIndicator{};
            } else {
                indicator.kind =
                    model::ThresholdIndicator{random_cmp(rng), rng.uniform(-2.0, 10.0), random_unit(rng)};
            }
            situation.indicators.push_back(indicator);
        }
        const std::size_t n_features = rng.index(4);
        for (std::size_t f = 0; f < n_features; ++f) {
            model::DomainFeature feature;
            feature.name = "feature " + std::to_string(f);
            if (rng.bernoulli(0.7)) {
                const double lo = rng.uniform(-5.0, 5.0);
                feature.domain =
                    model::ContinuousDomain{lo, lo + rng.uniform(0.1, 10.0), random_unit(rng)};
            } else {
                model::DiscreteDomain domain;
                const std::size_t n_categories = 1 + rng.index(4);
                for (std::size_t c = 0; c < n_categories; ++c) {
                    domain.categories.push_back("level " + std::to_string(c));
                }
                feature.domain = domain;
            }
            situation.features.push_back(feature);
        }
        if (situation.indicators.empty() && situation.features.empty()) {
            situation.indicators.push_back({"present", model::BooleanIndicator{}});
        }
        m.situations.push_back(situation);
    }
    // Every event must be exposed by at least one situation.
    for (const auto& event : m.events) {
        auto& situation = m.situations[rng.index(m.situations.size())];
        situation.exposes.push_back(event.name);
    }
    return m;
}

// Ten seeded defects; each must yield at least one ERROR diagnostic.
inline std::vector<std::pair<std::string, model::RiskModel>> defect_catalog(Rng& rng) {
    auto base = [&] {
        model::RiskModel m;
        while (m.events.empty() || m.goals.empty()) m = random_model(rng);
        return m;
    };
    std::vector<std::pair<std::string, model::RiskModel>> catalog;

    auto m = base();
    m.situations.front().exposes.push_back("no such event");
    catalog.emplace_back("unresolved exposes reference", m);

    m = base();
    m.events.front().impacts.push_back({"no such goal", 1.0});
    catalog.emplace_back("unresolved impacts reference", m);

    m = base();
    m.goals.front().refines = "no such goal";
    catalog.emplace_back("unresolved refines reference", m);

    m = base();
    m.events.push_back(m.events.front());
    catalog.emplace_back("duplicate event name", m);

    m = base();
    m.situations.front().features.push_back(
        {"twin", model::ContinuousDomain{0.0, 1.0, ""}});
    m.situations.front().features.push_back(
        {"twin", model::ContinuousDomain{0.0, 2.0, ""}});
    catalog.emplace_back("duplicate feature name", m);

    m = base();
    {
        model::Goal a{"cycle a", "cycle b", model::Refinement::And};
        model::Goal b{"cycle b", "cycle a", model::Refinement::And};
        m.goals.push_back(a);
        m.goals.push_back(b);
    }
    catalog.emplace_back("cyclic refinement", m);

    m = base();
    m.situations.front().features.push_back({"inverted", model::ContinuousDomain{2.0, 1.0, ""}});
    catalog.emplace_back("empty continuous domain", m);

    m = base();
    m.situations.front().features.push_back({"empty", model::DiscreteDomain{}});
    catalog.emplace_back("empty discrete domain", m);

    m = base();
    m.events.front().constraint.metric = "no_such_metric";
    catalog.emplace_back("unknown constraint metric", m);

    m = base();
    {
        model::Event orphan;
        orphan.name = "orphan event";
        orphan.constraint = {"min_separation", model::Comparator::Less,
                             model::LiteralBound{1.0, "m"}};
        m.events.push_back(orphan);
    }
    catalog.emplace_back("event not exposed", m);

    return catalog;
}

}  // namespace riskloop::testgen
