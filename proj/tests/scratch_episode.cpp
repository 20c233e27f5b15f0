// Development scratch: dump the close-encounter profile of one episode.
#include <cstdio>
#include <cstdlib>
#include <string>

#include "riskloop/sim.hpp"

using namespace riskloop;

int main(int argc, char** argv) {
    const std::string root = RISKLOOP_DATA_DIR;
    const std::string scenario_name = argc > 1 ? argv[1] : "seeded_violation";
    const double hs = argc > 2 ? atof(argv[2]) : 2.0;
    const double rs = argc > 3 ? atof(argv[3]) : 2.0;
    const double lum = argc > 4 ? atof(argv[4]) : 1000.0;
    auto scenario = sim::load_scenario(root + "/scenarios/" + scenario_name + ".cfg");
    sim::EnvConfig config;
    config.values[scenario.human_speed_feature] = hs;
    config.values[scenario.robot_speed_feature] = rs;
    config.values[scenario.luminance_feature] = lum;
    config.seed = 1;
    const auto trace = sim::run_episode(config, scenario);
    printf("min_separation=%.4f min_margin=%.4f violation=%s detection=%.3f\n",
           trace.min_separation, trace.min_margin,
           trace.violation_time ? "yes" : "no", trace.detection_rate);
    // Print every 0.1 s around the closest approach.
    std::size_t worst = 0;
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        if (trace.samples[i].separation - trace.samples[i].safety_zone <
            trace.samples[worst].separation - trace.samples[worst].safety_zone)
            worst = i;
    }
    const std::size_t begin = worst > 150 ? worst - 150 : 0;
    const std::size_t end = std::min(trace.samples.size(), worst + 50);
    for (std::size_t i = begin; i < end; i += 10) {
        const auto& s = trace.samples[i];
        printf("t=%6.2f human=(%.2f,%.2f) robot=(%.2f,%.2f) v=%.3f zone=%.3f sep=%.3f margin=%+.3f det=%d\n",
               s.time, s.human.x, s.human.y, s.robot.x, s.robot.y, s.robot_speed, s.safety_zone,
               s.separation, s.separation - s.safety_zone, s.detected ? 1 : 0);
    }
    return 0;
}
