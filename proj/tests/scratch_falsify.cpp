// Development scratch: grid-oracle minimum vs search strategies.
#include <cstdio>
#include <string>

#include "riskloop/artifacts.hpp"
#include "riskloop/falsification.hpp"
#include "riskloop/model.hpp"
#include "riskloop/sim.hpp"

using namespace riskloop;

int main() {
    const std::string root = RISKLOOP_DATA_DIR;
    const auto scenario = sim::load_scenario(root + "/scenarios/seeded_violation.cfg");
    const auto text = artifacts::read_file(root + "/models/collab_cell.rkml");
    const auto parsed = model::parse_model(text);
    const auto& m = *parsed.model;
    const auto* event = m.find_event("insufficient distance");

    // 20 x 20 x 10 exhaustive grid, endpoints included.
    double grid_min = 1e9;
    double gh = 0, gr = 0;
    for (int hi = 0; hi < 20; ++hi) {
        for (int ri = 0; ri < 20; ++ri) {
            for (int li = 0; li < 10; ++li) {
                sim::EnvConfig config;
                const double h = 0.0 + 2.0 * hi / 19.0;
                const double r = 0.5 + 1.5 * ri / 19.0;
                const double l = 50.0 + 950.0 * li / 9.0;
                config.values["speed of the human motion"] = h;
                config.values["speed of the robot motion"] = r;
                config.values["luminance of the working area"] = l;
                config.seed = derive_seed(7, static_cast<std::uint64_t>(hi * 200 + ri * 10 + li));
                const auto trace = sim::run_episode(config, scenario);
                const double obj = falsification::objective(trace, event->constraint);
                if (obj < grid_min) {
                    grid_min = obj;
                    gh = h;
                    gr = r;
                }
            }
        }
    }
    printf("grid min: %.6f at h=%.3f r=%.3f\n", grid_min, gh, gr);

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        falsification::Options evo{500, falsification::Strategy::Evolutionary, seed, false, 2};
        falsification::Options rnd{500, falsification::Strategy::Random, seed, false, 2};
        const auto er = falsification::falsify(m, "close interaction", "insufficient distance",
                                               scenario, evo);
        const auto rr = falsification::falsify(m, "close interaction", "insufficient distance",
                                               scenario, rnd);
        printf("seed %llu: evo best %.6f (within 10%%: %s) | random best %.6f | evo<=rnd: %s\n",
               static_cast<unsigned long long>(seed), er.best().objective,
               er.best().objective <= grid_min + 0.1 * std::abs(grid_min) ? "yes" : "NO",
               rr.best().objective, er.best().objective <= rr.best().objective ? "yes" : "NO");
    }
    return 0;
}
