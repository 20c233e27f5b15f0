#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "riskloop/falsification.hpp"

#include "riskloop/rng.hpp"

namespace riskloop::falsification {
namespace {

constexpr std::size_t kPopulationSize = 20;
constexpr std::size_t kTournamentSize = 3;
constexpr double kMutationSigmaFraction = 0.1;
constexpr double kCrossoverRate = 0.5;
constexpr double kDiscreteResampleProb = 0.2;
constexpr std::size_t kElitism = 1;

// Genomes hold continuous values directly and category indices for discrete dims.
using Genome = std::vector<double>;

Genome sample_uniform(const SearchSpace& space, Rng& rng) {
    Genome genome(space.size());
    for (std::size_t d = 0; d < space.size(); ++d) {
        if (const auto* cont = std::get_if<model::ContinuousDomain>(&space.dimensions[d].domain)) {
            genome[d] = rng.uniform(cont->lo, cont->hi);
        } else {
            const auto& disc = std::get<model::DiscreteDomain>(space.dimensions[d].domain);
            genome[d] = static_cast<double>(rng.index(disc.categories.size()));
        }
    }
    return genome;
}

sim::EnvConfig decode(const SearchSpace& space, const Genome& genome, std::uint64_t seed) {
    sim::EnvConfig config;
    config.seed = seed;
    for (std::size_t d = 0; d < space.size(); ++d) {
        const auto& dim = space.dimensions[d];
        if (std::holds_alternative<model::ContinuousDomain>(dim.domain)) {
            config.values[dim.name] = genome[d];
        } else {
            const auto& disc = std::get<model::DiscreteDomain>(dim.domain);
            const auto index = static_cast<std::size_t>(std::lround(genome[d]));
            config.values[dim.name] = disc.categories.at(index);
        }
    }
    return config;
}

void mutate(const SearchSpace& space, Genome& genome, Rng& rng) {
    for (std::size_t d = 0; d < space.size(); ++d) {
        if (const auto* cont = std::get_if<model::ContinuousDomain>(&space.dimensions[d].domain)) {
            const double sigma = kMutationSigmaFraction * (cont->hi - cont->lo);
            genome[d] = std::clamp(genome[d] + rng.gaussian(0.0, sigma), cont->lo, cont->hi);
        } else {
            const auto& disc = std::get<model::DiscreteDomain>(space.dimensions[d].domain);
            if (rng.bernoulli(kDiscreteResampleProb)) {
                genome[d] = static_cast<double>(rng.index(disc.categories.size()));
            }
        }
    }
}

struct Evaluated {
    Genome genome;
    double objective = 0.0;
};

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    unsigned n = workers == 0 ? std::thread::hardware_concurrency() : workers;
    n = std::max(1u, std::min<unsigned>(n, static_cast<unsigned>(count)));
    if (n == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    threads.reserve(n);
    for (unsigned w = 0; w < n; ++w) {
        threads.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) break;
                fn(i);
            }
        });
    }
    for (auto& t : threads) t.join();
}

class Evaluator {
public:
    Evaluator(const SearchSpace& space, const model::Constraint& constraint,
              const sim::ScenarioParams& scenario, std::uint64_t seed, unsigned workers)
        : space_(space), constraint_(constraint), scenario_(scenario), seed_(seed),
          workers_(workers) {}

    // Runs one episode per genome; results land in `samples` in genome order,
    // so assembly is deterministic regardless of worker scheduling.
    std::vector<Sample> evaluate(const std::vector<Genome>& genomes, std::size_t first_index) {
        std::vector<Sample> batch(genomes.size());
        std::exception_ptr failure;
        std::mutex failure_mutex;
        parallel_for(genomes.size(), workers_, [&](std::size_t i) {
            try {
                const std::uint64_t episode_seed = derive_seed(seed_, first_index + i + 1);
                sim::EnvConfig config = decode(space_, genomes[i], episode_seed);
                const sim::SimTrace trace = sim::run_episode(config, scenario_);
                const double score = objective(trace, constraint_);
                batch[i] = Sample{std::move(config), score, score < 0.0,
                                  {trace.min_separation, trace.violation_time, trace.detection_rate}};
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
        if (failure) std::rethrow_exception(failure);
        return batch;
    }

private:
    const SearchSpace& space_;
    const model::Constraint& constraint_;
    const sim::ScenarioParams& scenario_;
    std::uint64_t seed_;
    unsigned workers_;
};

std::size_t tournament_pick(const std::vector<Evaluated>& population, Rng& rng) {
    std::size_t best = rng.index(population.size());
    for (std::size_t i = 1; i < kTournamentSize; ++i) {
        const std::size_t candidate = rng.index(population.size());
        if (population[candidate].objective < population[best].objective) best = candidate;
    }
    return best;
}

const model::Constraint& event_constraint(const model::RiskModel& model,
                                          const std::string& situation, const std::string& event) {
    const model::Situation* sit = model.find_situation(situation);
    if (!sit) throw SearchError("unknown situation \"" + situation + "\"");
    const model::Event* ev = model.find_event(event);
    if (!ev) throw SearchError("unknown event \"" + event + "\"");
    if (std::find(sit->exposes.begin(), sit->exposes.end(), event) == sit->exposes.end()) {
        throw SearchError("situation \"" + situation + "\" does not expose event \"" + event + "\"");
    }
    return ev->constraint;
}

}  // namespace

SearchSpace build_search_space(const model::RiskModel& model, const std::string& situation) {
    const model::Situation* sit = model.find_situation(situation);
    if (!sit) throw SearchError("unknown situation \"" + situation + "\"");
    if (sit->features.empty()) {
        throw SearchError("situation \"" + situation + "\" declares no domain features");
    }
    SearchSpace space;
    for (const auto& feature : sit->features) {
        space.dimensions.push_back({feature.name, feature.domain});
    }
    return space;
}

bool config_in_space(const SearchSpace& space, const sim::EnvConfig& config) {
    for (const auto& dim : space.dimensions) {
        const auto it = config.values.find(dim.name);
        if (it == config.values.end()) return false;
        if (const auto* cont = std::get_if<model::ContinuousDomain>(&dim.domain)) {
            if (!std::holds_alternative<double>(it->second)) return false;
            const double v = std::get<double>(it->second);
            if (!(v >= cont->lo && v <= cont->hi)) return false;
        } else {
            const auto& disc = std::get<model::DiscreteDomain>(dim.domain);
            if (!std::holds_alternative<std::string>(it->second)) return false;
            const auto& label = std::get<std::string>(it->second);
            if (std::find(disc.categories.begin(), disc.categories.end(), label) ==
                disc.categories.end()) {
                return false;
            }
        }
    }
    return true;
}

double objective(const sim::SimTrace& trace, const model::Constraint& constraint) {
    const bool upper_bound = constraint.cmp == model::Comparator::Less ||
                             constraint.cmp == model::Comparator::LessEq;
    double robustness = 0.0;
    if (const auto* symbolic = std::get_if<model::SymbolicBound>(&constraint.bound)) {
        if (symbolic->symbol != "safety_distance") {
            throw std::invalid_argument("unknown symbolic bound \"" + symbolic->symbol + "\"");
        }
        if (constraint.metric != "min_separation" || !upper_bound) {
            throw std::invalid_argument(
                "symbolic bound safety_distance requires min_separation with < or <=");
        }
        robustness = trace.min_margin;
    } else {
        const double value = sim::metric_value(trace, constraint.metric);
        const double bound = std::get<model::LiteralBound>(constraint.bound).value;
        robustness = upper_bound ? value - bound : bound - value;
    }
    // violation_time can be +inf; saturate so results stay representable.
    return std::clamp(robustness, -1e9, 1e9);
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "random") return Strategy::Random;
    if (name == "evolutionary") return Strategy::Evolutionary;
    throw SearchError("unknown strategy \"" + name + "\" (use random or evolutionary)");
}

std::string strategy_name(Strategy strategy) {
    return strategy == Strategy::Random ? "random" : "evolutionary";
}

std::size_t FalsificationResult::violation_count() const {
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [](const Sample& s) { return s.violated; }));
}

std::string FalsificationResult::id() const {
    return strategy + "-b" + std::to_string(budget_used) + "-s" + std::to_string(seed);
}

FalsificationResult falsify(const model::RiskModel& model, const std::string& situation,
                            const std::string& event, const sim::ScenarioParams& scenario,
                            const Options& options) {
    if (options.budget == 0) throw SearchError("budget must be at least 1");
    const SearchSpace space = build_search_space(model, situation);
    const model::Constraint& constraint = event_constraint(model, situation, event);

    FalsificationResult result;
    result.strategy = strategy_name(options.strategy);
    result.seed = options.seed;

    Evaluator evaluator(space, constraint, scenario, options.seed, options.workers);
    Rng search_rng(derive_seed(options.seed, 0));

    bool stopped = false;
    auto absorb = [&](std::vector<Sample>&& batch) {
        for (auto& sample : batch) {
            result.samples.push_back(std::move(sample));
            if (options.early_stop && result.samples.back().violated) {
                stopped = true;
                break;
            }
        }
    };

    if (options.strategy == Strategy::Random) {
        while (result.samples.size() < options.budget && !stopped) {
            const std::size_t chunk =
                std::min<std::size_t>(64, options.budget - result.samples.size());
            std::vector<Genome> genomes;
            genomes.reserve(chunk);
            for (std::size_t i = 0; i < chunk; ++i) genomes.push_back(sample_uniform(space, search_rng));
            absorb(evaluator.evaluate(genomes, result.samples.size()));
        }
    } else {
        std::vector<Evaluated> population;
        const std::size_t initial = std::min(kPopulationSize, options.budget);
        std::vector<Genome> genomes;
        for (std::size_t i = 0; i < initial; ++i) genomes.push_back(sample_uniform(space, search_rng));
        {
            std::vector<Sample> batch = evaluator.evaluate(genomes, 0);
            for (std::size_t i = 0; i < batch.size(); ++i) {
                population.push_back({genomes[i], batch[i].objective});
            }
            absorb(std::move(batch));
        }
        while (result.samples.size() < options.budget && !stopped) {
            // Elite carried with its cached objective; it costs no budget.
            const auto elite_it = std::min_element(
                population.begin(), population.end(),
                [](const Evaluated& a, const Evaluated& b) { return a.objective < b.objective; });
            const Evaluated elite = *elite_it;

            const std::size_t remaining = options.budget - result.samples.size();
            const std::size_t offspring = std::min(kPopulationSize - kElitism, remaining);
            std::vector<Genome> children;
            children.reserve(offspring);
            for (std::size_t i = 0; i < offspring; ++i) {
                const Genome& parent_a = population[tournament_pick(population, search_rng)].genome;
                const Genome& parent_b = population[tournament_pick(population, search_rng)].genome;
                Genome child = parent_a;
                if (search_rng.bernoulli(kCrossoverRate)) {
                    for (std::size_t d = 0; d < child.size(); ++d) {
                        if (search_rng.bernoulli(0.5)) child[d] = parent_b[d];
                    }
                }
                mutate(space, child, search_rng);
                children.push_back(std::move(child));
            }
            std::vector<Sample> batch = evaluator.evaluate(children, result.samples.size());
            std::vector<Evaluated> next;
            next.push_back(elite);
            for (std::size_t i = 0; i < batch.size(); ++i) {
                next.push_back({children[i], batch[i].objective});
            }
            population = std::move(next);
            absorb(std::move(batch));
        }
    }

    result.budget_used = result.samples.size();
    result.best_index = 0;
    for (std::size_t i = 1; i < result.samples.size(); ++i) {
        if (result.samples[i].objective < result.samples[result.best_index].objective) {
            result.best_index = i;
        }
    }
    return result;
}

double conditional_violation_prob(const model::RiskModel& model, const std::string& situation,
                                  const std::string& event, const sim::ScenarioParams& scenario,
                                  std::size_t n, std::uint64_t seed, unsigned workers) {
    if (n == 0) throw SearchError("sample count must be at least 1");
    const SearchSpace space = build_search_space(model, situation);
    const model::Constraint& constraint = event_constraint(model, situation, event);

    Rng sampler(derive_seed(seed, 0));
    std::vector<Genome> genomes;
    genomes.reserve(n);
    for (std::size_t i = 0; i < n; ++i) genomes.push_back(sample_uniform(space, sampler));

    Evaluator evaluator(space, constraint, scenario, seed, workers);
    std::size_t violations = 0;
    // Evaluate in chunks to keep memory flat for large n.
    std::size_t done = 0;
    while (done < n) {
        const std::size_t chunk = std::min<std::size_t>(1024, n - done);
        std::vector<Genome> slice(genomes.begin() + static_cast<std::ptrdiff_t>(done),
                                  genomes.begin() + static_cast<std::ptrdiff_t>(done + chunk));
        const std::vector<Sample> batch = evaluator.evaluate(slice, done);
        for (const Sample& sample : batch) {
            if (sample.violated) ++violations;
        }
        done += chunk;
    }
    return static_cast<double>(violations) / static_cast<double>(n);
}

}  // namespace riskloop::falsification
