// Spawns a two-UAV world, prints its links, then compares the heuristics and
// the genie-aided bound over a handful of evaluation episodes.
#include <cstdio>

#include "uavslice/uavslice.hpp"

using namespace uavslice;

int main() {
  RolloutSpec spec;
  spec.arena.uav_count = 2;

  Rng rng(42);
  WorldState world = spawn_episode(spec.arena, rng);
  std::printf("arena %.1f m, %zu users, %zu UAVs\n", world.arena_side_m, world.users.size(), world.uavs.size());

  const auto links = associate(world, spec.channel);
  int covered = 0;
  for (const auto& l : links) covered += l.serving_uav.has_value();
  std::printf("covered at spawn: %d\n", covered);

  RandomPolicy random;
  CentroidPolicy rapoc(HeuristicKind::RAPoC, spec.arena.slice_demands_bps);
  CentroidPolicy papoc(HeuristicKind::PAPoC, spec.arena.slice_demands_bps);
  OraclePolicy oracle(spec.channel, OracleConfig{});

  const int episodes = 5;
  for (Policy* p : {static_cast<Policy*>(&random), static_cast<Policy*>(&rapoc), static_cast<Policy*>(&papoc),
                    static_cast<Policy*>(&oracle)}) {
    const auto s = evaluate_policy(*p, spec, episodes, 42);
    std::printf("%-8s mean %8.1f  95%% CI [%8.1f, %8.1f]\n", p->name().c_str(), s.stats.mean, s.stats.ci_low,
                s.stats.ci_high);
  }
}
