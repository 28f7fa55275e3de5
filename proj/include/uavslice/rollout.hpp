#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "uavslice/baselines.hpp"
#include "uavslice/env.hpp"
#include "uavslice/oracle.hpp"
#include "uavslice/radio.hpp"
#include "uavslice/rng.hpp"
#include "uavslice/slicing.hpp"
#include "uavslice/stats.hpp"

namespace uavslice {

struct Decision {
  std::vector<MoveAction> moves;
  std::vector<BandwidthSplit> splits;
};

// A joint placement/allocation controller for the whole fleet.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  // Hook before the first step; centroid and oracle policies teleport here.
  virtual void begin_episode(WorldState& /*world*/, Rng& /*rng*/) {}
  virtual Decision decide(const WorldState& world, std::span<const LinkReport> links, Rng& rng) = 0;
};

class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(double bw_step = 0.1) : simplex_(simplex_grid(bw_step)) {}
  std::string name() const override { return "random"; }
  Decision decide(const WorldState& world, std::span<const LinkReport>, Rng& rng) override {
    Decision d;
    for (std::size_t b = 0; b < world.uavs.size(); ++b) {
      const auto r = random_policy(rng, simplex_);
      d.moves.push_back(r.move);
      d.splits.push_back(r.split);
    }
    return d;
  }

 private:
  std::vector<BandwidthSplit> simplex_;
};

// RAPoC and PAPoC: teleport to matched centroids and hover.
class CentroidPolicy final : public Policy {
 public:
  CentroidPolicy(HeuristicKind kind, std::array<double, kSliceCount> demands, double bw_step = 0.1,
                 ProportionalForm form = ProportionalForm::Aggregated)
      : kind_(kind), demands_(demands), form_(form), simplex_(simplex_grid(bw_step)) {}

  std::string name() const override { return heuristic_name(kind_); }

  void begin_episode(WorldState& world, Rng&) override {
    const auto targets = assign_centroids(world);
    for (std::size_t b = 0; b < world.uavs.size(); ++b) world.uavs[b].position = targets[b];
  }

  Decision decide(const WorldState& world, std::span<const LinkReport> links, Rng& rng) override {
    Decision d;
    for (std::size_t b = 0; b < world.uavs.size(); ++b) {
      d.moves.push_back(MoveAction::Hover);
      if (kind_ == HeuristicKind::PAPoC)
        d.splits.push_back(papoc_split(world, b, links, demands_, form_));
      else
        d.splits.push_back(simplex_[rng.uniform_index(simplex_.size())]);
    }
    return d;
  }

 private:
  HeuristicKind kind_;
  std::array<double, kSliceCount> demands_;
  ProportionalForm form_;
  std::vector<BandwidthSplit> simplex_;
};

// Genie-aided placement: teleport to the oracle optimum and hold its splits.
class OraclePolicy final : public Policy {
 public:
  OraclePolicy(ChannelParams params, OracleConfig cfg) : params_(params), cfg_(cfg) {}
  std::string name() const override { return "optimal"; }

  void begin_episode(WorldState& world, Rng&) override {
    std::vector<Vec2> start;
    if (static_cast<int>(world.uavs.size()) > cfg_.max_uavs_exact) start = assign_centroids(world);
    last_ = solve_oracle(world, params_, cfg_, start);
    for (std::size_t b = 0; b < world.uavs.size(); ++b) world.uavs[b].position = last_.positions[b];
  }

  Decision decide(const WorldState& world, std::span<const LinkReport>, Rng&) override {
    return {std::vector<MoveAction>(world.uavs.size(), MoveAction::Hover), last_.splits};
  }

  const OracleSolution& last_solution() const { return last_; }

 private:
  ChannelParams params_;
  OracleConfig cfg_;
  OracleSolution last_;
};

struct EpisodeResult {
  double reward = 0.0;  // sum over steps and UAVs of satisfied associated users
  std::vector<int> step_rewards;
  std::vector<std::vector<Vec2>> trajectory;  // UAV positions after each step
  WorldState final_world;
};

struct RolloutSpec {
  ArenaConfig arena;
  ChannelParams channel;
  int steps = 100;
  bool record_trajectory = false;
};

// One step: decide on the current world, move simultaneously, re-associate,
// schedule with the chosen splits.
inline ScheduleOutcome advance(WorldState& world, const Decision& decision, const ArenaConfig& arena,
                               const ChannelParams& channel) {
  world = step_world(world, decision.moves, arena.step_m);
  const auto links = associate(world, channel);
  return evaluate(world, decision.splits, links);
}

inline EpisodeResult run_episode(const RolloutSpec& spec, Policy& policy, Rng& world_rng, Rng& policy_rng) {
  EpisodeResult res;
  WorldState world = spawn_episode(spec.arena, world_rng);
  policy.begin_episode(world, policy_rng);
  for (int t = 0; t < spec.steps; ++t) {
    const auto links = associate(world, spec.channel);
    const Decision d = policy.decide(world, links, policy_rng);
    const auto outcome = advance(world, d, spec.arena, spec.channel);
    const int r = outcome.total_reward();
    res.step_rewards.push_back(r);
    res.reward += r;
    if (spec.record_trajectory) {
      std::vector<Vec2> pos;
      for (const auto& u : world.uavs) pos.push_back(u.position);
      res.trajectory.push_back(std::move(pos));
    }
  }
  res.final_world = std::move(world);
  return res;
}

struct EvalSummary {
  std::string policy;
  std::vector<double> episode_rewards;
  MeanCi stats;
};

// Episode i draws its world from stream (seed, eval-world, i) so every policy
// sees the same worlds.
inline Rng eval_world_rng(std::uint64_t seed, std::size_t episode) {
  return Rng(seed).fork(streams::kEvalWorld).fork(episode);
}

inline Rng eval_policy_rng(std::uint64_t seed, std::size_t episode) {
  return Rng(seed).fork(streams::kEvalPolicy).fork(episode);
}

inline EvalSummary evaluate_policy(Policy& policy, const RolloutSpec& spec, int episodes, std::uint64_t seed) {
  EvalSummary out;
  out.policy = policy.name();
  for (int e = 0; e < episodes; ++e) {
    Rng wr = eval_world_rng(seed, static_cast<std::size_t>(e));
    Rng pr = eval_policy_rng(seed, static_cast<std::size_t>(e));
    out.episode_rewards.push_back(run_episode(spec, policy, wr, pr).reward);
  }
  out.stats = mean_ci95(out.episode_rewards);
  return out;
}

}  // namespace uavslice
