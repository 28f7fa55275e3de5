#include <catch_amalgamated.hpp>

#include <sstream>

#include "uavslice/learn/checkpoint.hpp"

using namespace uavslice;
using namespace uavslice::learn;

namespace {
LearnedPolicy trained_policy() {
  ArenaConfig arena;
  TrainConfig cfg;
  cfg.episodes = 2;
  cfg.steps_per_episode = 40;
  return LearnedPolicy(train(arena, ChannelParams{}, cfg, 3).agents);
}

bool same_weights(const Mlp<float>& a, const Mlp<float>& b) {
  if (a.layer_dims() != b.layer_dims()) return false;
  for (std::size_t l = 0; l < a.layers(); ++l)
    if (a.weight(l) != b.weight(l) || a.bias(l) != b.bias(l)) return false;
  return true;
}
}  // namespace

TEST_CASE("checkpoint round trip is exact") {
  const auto policy = trained_policy();
  std::stringstream buf;
  write_checkpoint(buf, policy);
  const auto text = buf.str();
  CHECK(text.rfind("uavslice-checkpoint 1\n", 0) == 0);
  const auto loaded = read_checkpoint(buf);
  REQUIRE(loaded.fleet_size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(same_weights(policy.alloc_nets()[k], loaded.alloc_nets()[k]));
    CHECK(same_weights(policy.place_nets()[k], loaded.place_nets()[k]));
  }
  std::stringstream again;
  write_checkpoint(again, loaded);
  CHECK(again.str() == text);
}

TEST_CASE("greedy replay of a checkpoint is deterministic") {
  const auto policy = trained_policy();
  std::stringstream buf;
  write_checkpoint(buf, policy);
  auto a = read_checkpoint(buf);
  auto b = policy;
  RolloutSpec spec;
  spec.steps = 30;
  spec.record_trajectory = true;
  for (std::size_t e = 0; e < 3; ++e) {
    Rng w1 = eval_world_rng(5, e), w2 = eval_world_rng(5, e);
    Rng p1 = eval_policy_rng(5, e), p2 = eval_policy_rng(5, e);
    const auto r1 = run_episode(spec, a, w1, p1);
    const auto r2 = run_episode(spec, b, w2, p2);
    CHECK(r1.step_rewards == r2.step_rewards);
    CHECK(r1.trajectory == r2.trajectory);
  }
}

TEST_CASE("malformed checkpoints are rejected") {
  std::stringstream empty;
  CHECK_THROWS_AS(read_checkpoint(empty), RuntimeError);
  std::stringstream version("uavslice-checkpoint 9\n");
  CHECK_THROWS_AS(read_checkpoint(version), RuntimeError);

  const auto policy = trained_policy();
  std::stringstream buf;
  write_checkpoint(buf, policy);
  std::string text = buf.str();
  std::stringstream truncated(text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(read_checkpoint(truncated), RuntimeError);
  std::string wrong = text;
  wrong.replace(wrong.find("simplex 0.1 66"), 14, "simplex 0.1 65");
  std::stringstream bad_actions(wrong);
  CHECK_THROWS_AS(read_checkpoint(bad_actions), RuntimeError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/ck.txt"), RuntimeError);
}

TEST_CASE("policy refuses a world of the wrong fleet size") {
  auto policy = trained_policy();
  ArenaConfig arena;
  arena.uav_count = 3;
  Rng rng(1);
  const auto w = spawn_episode(arena, rng);
  const auto links = associate(w, ChannelParams{});
  CHECK_THROWS_AS(policy.decide(w, links, rng), DimensionMismatch);
}
