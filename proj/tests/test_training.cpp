#include <catch_amalgamated.hpp>

#include <cmath>

#include "uavslice/learn/trainer.hpp"

using namespace uavslice;
using namespace uavslice::learn;

namespace {
double mean_of(const std::vector<EpisodeLog>& curve, std::size_t from, std::size_t to) {
  double s = 0.0;
  for (std::size_t i = from; i < to; ++i) s += curve[i].reward;
  return s / static_cast<double>(to - from);
}
}  // namespace

TEST_CASE("epsilon frozen at one behaves like the random baseline") {
  ArenaConfig arena;
  TrainConfig cfg;
  cfg.episodes = 200;
  cfg.epsilon_decay = 1.0;
  const auto res = train(arena, ChannelParams{}, cfg, 21);
  std::vector<double> learner;
  for (const auto& e : res.curve) {
    learner.push_back(e.reward);
    REQUIRE(e.epsilon == 1.0);
  }
  RolloutSpec spec;
  spec.arena = arena;
  RandomPolicy random;
  const auto base = evaluate_policy(random, spec, 200, 21);
  const auto a = mean_ci95(learner);
  const double se = std::sqrt(a.std_error * a.std_error + base.stats.std_error * base.stats.std_error);
  CHECK(std::abs(a.mean - base.stats.mean) < 2.0 * se);
}

TEST_CASE("single UAV learner improves over 2000 episodes") {
  ArenaConfig arena;
  arena.uav_count = 1;
  TrainConfig cfg;
  cfg.episodes = 2000;
  const auto res = train(arena, ChannelParams{}, cfg, 5);
  REQUIRE(res.curve.size() == 2000);
  const double first = mean_of(res.curve, 0, 100);
  const double last = mean_of(res.curve, 1900, 2000);
  INFO("first 100: " << first << ", last 100: " << last);
  CHECK(last > first);
  for (std::size_t i = 1; i < res.curve.size(); ++i) {
    REQUIRE(res.curve[i].epsilon <= res.curve[i - 1].epsilon);
    REQUIRE(res.curve[i].epsilon >= 0.01);
  }
}

TEST_CASE("both agents of a UAV store the same reward") {
  ArenaConfig arena;
  TrainConfig cfg;
  cfg.episodes = 3;
  cfg.steps_per_episode = 50;
  const auto res = train(arena, ChannelParams{}, cfg, 8);
  for (const auto& agents : res.agents) {
    const auto& a = agents.alloc.replay();
    const auto& p = agents.place.replay();
    REQUIRE(a.size() == 150);
    REQUIRE(p.size() == 150);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.at(i).reward == p.at(i).reward);
      CHECK_FALSE(a.at(i).terminal);
      CHECK(a.at(i).action < 66);
      CHECK(p.at(i).action < 5);
      CHECK(a.at(i).reward <= static_cast<float>(user_count(arena)));
    }
  }
}

TEST_CASE("training is deterministic for a seed") {
  ArenaConfig arena;
  TrainConfig cfg;
  cfg.episodes = 4;
  const auto a = train(arena, ChannelParams{}, cfg, 13);
  const auto b = train(arena, ChannelParams{}, cfg, 13);
  for (std::size_t i = 0; i < a.curve.size(); ++i) CHECK(a.curve[i].reward == b.curve[i].reward);
  CHECK(a.agents[0].alloc.network().weight(0) == b.agents[0].alloc.network().weight(0));
}

TEST_CASE("fleets beyond the observation capacity are rejected") {
  ArenaConfig arena;
  arena.uav_count = 6;
  TrainConfig cfg;
  cfg.episodes = 1;
  CHECK_THROWS_AS(train(arena, ChannelParams{}, cfg, 1), ConfigError);
}
