#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "uavslice/env.hpp"
#include "uavslice/learn/dqn.hpp"
#include "uavslice/learn/observation.hpp"
#include "uavslice/radio.hpp"
#include "uavslice/rng.hpp"
#include "uavslice/rollout.hpp"
#include "uavslice/slicing.hpp"

namespace uavslice::learn {

inline constexpr double kAllocBwStep = 0.1;

inline const std::vector<BandwidthSplit>& alloc_actions() {
  static const std::vector<BandwidthSplit> actions = simplex_grid(kAllocBwStep);
  return actions;
}

inline std::vector<int> network_dims(std::size_t inputs, const std::vector<int>& hidden, std::size_t outputs) {
  std::vector<int> dims;
  dims.push_back(static_cast<int>(inputs));
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(static_cast<int>(outputs));
  return dims;
}

// The two virtual agents hosted by one UAV.
struct UavAgents {
  DqnAgent<float> alloc;
  DqnAgent<float> place;
};

struct EpisodeLog {
  int episode = 0;
  double reward = 0.0;
  double epsilon = 0.0;  // value after the episode's last step
};

struct TrainResult {
  std::vector<UavAgents> agents;
  std::vector<EpisodeLog> curve;
};

using EpisodeCallback = std::function<void(const EpisodeLog&)>;

// Per step and UAV: allocation agent picks a split from its demand view, the
// placement agent picks a move seeing that split; moves apply simultaneously,
// then both agents of UAV b receive the count of its satisfied users.
inline TrainResult train(const ArenaConfig& arena, const ChannelParams& channel, const TrainConfig& cfg,
                         std::uint64_t seed, const EpisodeCallback& on_episode = {}) {
  arena.validate();
  cfg.validate();
  if (static_cast<std::size_t>(arena.uav_count) > kMaxFleet)
    throw ConfigError("fleet size exceeds the observation's peer capacity of " + std::to_string(kMaxFleet));
  const auto& actions = alloc_actions();
  const std::size_t n_uavs = static_cast<std::size_t>(arena.uav_count);

  TrainResult result;
  Rng init_rng = Rng(seed).fork(streams::kInit);
  for (std::size_t b = 0; b < n_uavs; ++b) {
    DqnAgent<float> alloc(network_dims(kAllocObsSize, cfg.hidden, actions.size()), cfg, init_rng);
    DqnAgent<float> place(network_dims(kPlaceObsSize, cfg.hidden, kMoveCount), cfg, init_rng);
    result.agents.push_back({std::move(alloc), std::move(place)});
  }

  Rng policy_rng = Rng(seed).fork(streams::kTrainPolicy);
  const Rng world_root = Rng(seed).fork(streams::kTrainWorld);
  double epsilon = cfg.epsilon_start;
  const double total_steps = static_cast<double>(cfg.episodes) * cfg.steps_per_episode;
  long global_step = 0;

  std::vector<std::vector<float>> alloc_obs(n_uavs), place_obs(n_uavs);
  std::vector<std::size_t> alloc_choice(n_uavs), move_choice(n_uavs);

  for (int e = 0; e < cfg.episodes; ++e) {
    Rng world_rng = world_root.fork(static_cast<std::uint64_t>(e));
    WorldState world = spawn_episode(arena, world_rng);
    auto links = associate(world, channel);
    double episode_reward = 0.0;

    for (int t = 0; t < cfg.steps_per_episode; ++t) {
      Decision decision;
      for (std::size_t b = 0; b < n_uavs; ++b) {
        auto& agents = result.agents[b];
        alloc_obs[b] = make_alloc_observation(world, links, b).encode();
        alloc_choice[b] = agents.alloc.act(alloc_obs[b], epsilon, policy_rng);
        const BandwidthSplit split = actions[alloc_choice[b]];
        place_obs[b] = make_place_observation(world, b, split).encode();
        move_choice[b] = agents.place.act(place_obs[b], epsilon, policy_rng);
        decision.splits.push_back(split);
        decision.moves.push_back(static_cast<MoveAction>(move_choice[b]));
      }

      world = step_world(world, decision.moves, arena.step_m);
      links = associate(world, channel);
      const auto outcome = evaluate(world, decision.splits, links);
      episode_reward += outcome.total_reward();

      const double beta =
          total_steps > 0 ? cfg.beta_start + (cfg.beta_end - cfg.beta_start) * std::min(1.0, global_step / total_steps)
                          : cfg.beta_end;
      for (std::size_t b = 0; b < n_uavs; ++b) {
        auto& agents = result.agents[b];
        const auto reward = static_cast<float>(outcome.per_uav_reward[b]);
        auto next_alloc = make_alloc_observation(world, links, b).encode();
        // The placement agent's next view carries the split its partner would
        // pick greedily there.
        const BandwidthSplit next_split = actions[agents.alloc.greedy(next_alloc)];
        auto next_place = make_place_observation(world, b, next_split).encode();
        // Episodes end on a time limit, so every transition bootstraps.
        agents.alloc.remember({alloc_obs[b], static_cast<int>(alloc_choice[b]), reward, std::move(next_alloc), false});
        agents.place.remember({place_obs[b], static_cast<int>(move_choice[b]), reward, std::move(next_place), false});
        agents.alloc.learn(beta, policy_rng);
        agents.place.learn(beta, policy_rng);
      }
      epsilon = epsilon_step(epsilon, cfg.epsilon_decay, cfg.epsilon_min);
      ++global_step;
    }

    EpisodeLog log{e, episode_reward, epsilon};
    result.curve.push_back(log);
    if (on_episode) on_episode(log);
  }
  return result;
}

// Greedy fleet controller built from trained (or loaded) networks.
class LearnedPolicy final : public Policy {
 public:
  LearnedPolicy(std::vector<Mlp<float>> alloc_nets, std::vector<Mlp<float>> place_nets)
      : alloc_(std::move(alloc_nets)), place_(std::move(place_nets)) {
    if (alloc_.size() != place_.size()) throw DimensionMismatch("one allocation and one placement net per UAV");
  }

  explicit LearnedPolicy(const std::vector<UavAgents>& agents) {
    for (const auto& a : agents) {
      alloc_.push_back(a.alloc.network());
      place_.push_back(a.place.network());
    }
  }

  std::string name() const override { return "dqn"; }
  std::size_t fleet_size() const { return alloc_.size(); }
  const std::vector<Mlp<float>>& alloc_nets() const { return alloc_; }
  const std::vector<Mlp<float>>& place_nets() const { return place_; }

  Decision decide(const WorldState& world, std::span<const LinkReport> links, Rng& rng) override {
    if (world.uavs.size() != alloc_.size())
      throw DimensionMismatch("policy trained for " + std::to_string(alloc_.size()) + " UAVs, world has " +
                              std::to_string(world.uavs.size()));
    Decision d;
    const auto& actions = alloc_actions();
    for (std::size_t b = 0; b < world.uavs.size(); ++b) {
      const auto a_obs = make_alloc_observation(world, links, b).encode();
      const BandwidthSplit split = actions[select_action(alloc_[b], a_obs, epsilon_, rng)];
      const auto p_obs = make_place_observation(world, b, split).encode();
      d.splits.push_back(split);
      d.moves.push_back(static_cast<MoveAction>(select_action(place_[b], p_obs, epsilon_, rng)));
    }
    return d;
  }

  // Evaluation is greedy unless set otherwise.
  void set_epsilon(double eps) { epsilon_ = eps; }

 private:
  std::vector<Mlp<float>> alloc_;
  std::vector<Mlp<float>> place_;
  double epsilon_ = 0.0;
};

}  // namespace uavslice::learn
