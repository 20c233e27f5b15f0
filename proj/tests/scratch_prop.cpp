// Development scratch: perfect-perception safety margin scan.
#include <cstdio>
#include <string>

#include "riskloop/rng.hpp"
#include "riskloop/sim.hpp"

using namespace riskloop;

int main(int argc, char** argv) {
    const std::string root = RISKLOOP_DATA_DIR;
    auto scenario = sim::load_scenario(root + "/scenarios/seeded_violation.cfg");
    scenario.safety.decel = argc > 1 ? atof(argv[1]) : 10.0;  // v_max/a <= T_s
    scenario.perception.p_min = 1.0;
    scenario.perception.p_max = 1.0;
    scenario.human_clearance = argc > 2 ? atof(argv[2]) : 0.5;

    Rng rng(777);
    double worst = 1e9;
    double worst_h = 0, worst_r = 0;
    int below_c = 0;
    for (int i = 0; i < 500; ++i) {
        sim::EnvConfig config;
        const double h = rng.uniform(0.0, 2.0);
        const double r = rng.uniform(0.5, 2.0);
        config.values[scenario.human_speed_feature] = h;
        config.values[scenario.robot_speed_feature] = r;
        config.values[scenario.luminance_feature] = rng.uniform(50.0, 1000.0);
        config.seed = derive_seed(777, i);
        const auto trace = sim::run_episode(config, scenario);
        if (trace.min_separation < worst) {
            worst = trace.min_separation;
            worst_h = h;
            worst_r = r;
        }
        if (trace.min_separation < scenario.safety.intrusion_margin) ++below_c;
    }
    printf("decel=%.1f clearance=%.2f: worst min_separation=%.4f (h=%.2f r=%.2f), below C: %d/500\n",
           scenario.safety.decel, scenario.human_clearance, worst, worst_h, worst_r, below_c);
    return 0;
}
