// Minimal library usage: run a short proposed-vs-baseline match and print
// what happened.

#include <cstdio>
#include <fstream>

#include "robosoc/robosoc.hpp"

int main() {
    robosoc::ScenarioConfig cfg;
    cfg.seed = 7;
    cfg.duration_s = 60.0;

    const robosoc::MatchResult result = robosoc::run_match(cfg);
    std::printf("60 s match: proposed %d - %d baseline\n", result.goals_a, result.goals_b);
    std::printf("kicks: %d vs %d, mean tick %.3f ms\n", result.kicks_a, result.kicks_b,
                result.mean_tick_ms);

    std::ofstream svg("quickstart.svg");
    robosoc::write_trajectory_svg(svg, result.log, cfg.field);
    std::puts("trajectories written to quickstart.svg");
    return 0;
}
