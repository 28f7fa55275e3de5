#include <catch_amalgamated.hpp>

#include <numeric>

#include "uavslice/learn/observation.hpp"
#include "uavslice/learn/trainer.hpp"

using namespace uavslice;
using namespace uavslice::learn;

TEST_CASE("observation sizes") {
  CHECK(kAllocObsSize == 3);
  CHECK(kPlaceObsSize == 3 * 32 + 8 + 3);
  CHECK(alloc_actions().size() == 66);
  for (const auto& s : alloc_actions()) CHECK(s.valid(1e-12));
}

TEST_CASE("rings and sectors") {
  CHECK(ring_of(0.0) == 0);
  CHECK(ring_of(24.9) == 0);
  CHECK(ring_of(25.0) == 1);
  CHECK(ring_of(149.9) == 2);
  CHECK(ring_of(150.0) == 3);
  CHECK(ring_of(1e6) == 3);
  CHECK(sector_of(1, 0.01) == 0);
  CHECK(sector_of(0.01, 1) == 1);
  CHECK(sector_of(-0.01, 1) == 2);
  CHECK(sector_of(-1, 0.01) == 3);
  CHECK(sector_of(-1, -0.01) == 4);
  CHECK(sector_of(1, -0.01) == 7);
}

TEST_CASE("allocation observation aggregates the UAV's own users") {
  ArenaConfig cfg;
  Rng rng(5);
  const auto w = spawn_episode(cfg, rng);
  const auto links = associate(w, ChannelParams{});
  for (std::size_t k = 0; k < w.uavs.size(); ++k) {
    const auto obs = make_alloc_observation(w, links, k);
    std::array<double, 3> want{};
    for (std::size_t g = 0; g < w.users.size(); ++g)
      if (links[g].serving_uav == k) want[index_of(w.users[g].slice)] += w.users[g].demand_bps / 100e6;
    for (std::size_t s = 0; s < 3; ++s) {
      CHECK(obs.agg_demand[s] == Catch::Approx(want[s]));
      CHECK(obs.agg_demand[s] >= 0.0);
    }
  }
}

TEST_CASE("placement observation invariants") {
  Rng rng(6);
  for (int n = 1; n <= 5; ++n) {
    ArenaConfig cfg;
    cfg.uav_count = n;
    const auto w = spawn_episode(cfg, rng);
    for (std::size_t k = 0; k < w.uavs.size(); ++k) {
      const BandwidthSplit split{0.2, 0.3, 0.5};
      const auto obs = make_place_observation(w, k, split);
      const auto v = obs.encode();
      REQUIRE(v.size() == kPlaceObsSize);
      float total = 0;
      for (std::size_t i = 0; i < 96; ++i) {
        CHECK(v[i] >= 0.0f);
        total += v[i];
      }
      CHECK(total == static_cast<float>(w.users.size()));
      // Peer slots beyond the fleet stay zero.
      for (std::size_t i = 96 + 2 * (w.uavs.size() - 1); i < 104; ++i) CHECK(v[i] == 0.0f);
      for (std::size_t i = 96; i < 104; ++i) CHECK(std::abs(v[i]) <= 1.0f);
      CHECK(v[104] == 0.2f);
      CHECK(v[105] == 0.3f);
      CHECK(v[106] == 0.5f);
    }
  }
}

TEST_CASE("peer offsets are relative and scaled by the arena side") {
  WorldState w;
  w.arena_side_m = 500;
  w.uavs = {{0, {100, 100}, 50}, {1, {350, 50}, 50}};
  const auto v = make_place_observation(w, 0, {}).encode();
  CHECK(v[96] == Catch::Approx(0.5));
  CHECK(v[97] == Catch::Approx(-0.1));
  const auto u = make_place_observation(w, 1, {}).encode();
  CHECK(u[96] == Catch::Approx(-0.5));
}
