#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "uavslice/errors.hpp"
#include "uavslice/learn/mlp.hpp"
#include "uavslice/learn/replay.hpp"
#include "uavslice/rng.hpp"

namespace uavslice::learn {

struct TrainConfig {
  int episodes = 5000;
  int steps_per_episode = 100;
  int eval_episodes = 200;
  double gamma = 0.95;
  double learning_rate = 1e-4;
  double epsilon_start = 1.0;
  double epsilon_decay = 0.99995;
  double epsilon_min = 0.01;
  int batch_size = 32;
  int buffer_size = 1000;
  int target_sync_steps = 200;
  double priority_alpha = 0.6;
  double beta_start = 0.4;
  double beta_end = 1.0;
  std::vector<int> hidden = {128, 128};

  void validate() const {
    if (episodes < 0) throw ConfigError("episodes must be >= 0");
    if (steps_per_episode < 1) throw ConfigError("steps_per_episode must be >= 1");
    if (eval_episodes < 0) throw ConfigError("eval_episodes must be >= 0");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must be in (0, 1)");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (!(epsilon_min >= 0.0 && epsilon_min <= 1.0)) throw ConfigError("epsilon_min must be in [0, 1]");
    if (!(epsilon_start >= epsilon_min && epsilon_start <= 1.0)) throw ConfigError("epsilon_start must be in [epsilon_min, 1]");
    if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) throw ConfigError("epsilon_decay must be in (0, 1]");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (buffer_size < batch_size) throw ConfigError("buffer_size must be >= batch_size");
    if (target_sync_steps < 1) throw ConfigError("target_sync_steps must be >= 1");
    if (!(priority_alpha >= 0.0)) throw ConfigError("priority_alpha must be >= 0");
    if (!(beta_start >= 0.0 && beta_end >= 0.0)) throw ConfigError("beta must be >= 0");
    for (int h : hidden)
      if (h < 1) throw ConfigError("hidden layer sizes must be positive");
  }
};

inline double epsilon_step(double epsilon, double decay = 0.99995, double floor = 0.01) {
  return std::max(floor, epsilon * decay);
}

// Lowest index among maximal values.
template <typename Vec>
std::size_t argmax(const Vec& q) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < static_cast<std::size_t>(q.size()); ++i)
    if (q[i] > q[best]) best = i;
  return best;
}

// Epsilon-greedy; with epsilon == 0 no random numbers are consumed.
template <typename Scalar>
std::size_t select_action(const Mlp<Scalar>& net, std::span<const float> obs, double epsilon, Rng& rng) {
  if (epsilon > 0.0 && rng.uniform() < epsilon) return rng.uniform_index(static_cast<std::size_t>(net.output_size()));
  typename Mlp<Scalar>::Vector x(static_cast<Eigen::Index>(obs.size()));
  for (std::size_t i = 0; i < obs.size(); ++i) x[static_cast<Eigen::Index>(i)] = static_cast<Scalar>(obs[i]);
  return argmax(net.forward(x));
}

template <typename Scalar>
struct TdBatch {
  using Matrix = typename Mlp<Scalar>::Matrix;
  Matrix obs;       // in x B
  Matrix next_obs;  // in x B
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<bool> terminal;
  std::vector<double> weights;
};

template <typename Scalar>
TdBatch<Scalar> gather_batch(const PrioritizedReplay& buffer, const SampledBatch& sample) {
  TdBatch<Scalar> b;
  const auto n = static_cast<Eigen::Index>(sample.indices.size());
  const auto dim = static_cast<Eigen::Index>(buffer.at(sample.indices.front()).obs.size());
  b.obs.resize(dim, n);
  b.next_obs.resize(dim, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& t = buffer.at(sample.indices[static_cast<std::size_t>(k)]);
    for (Eigen::Index r = 0; r < dim; ++r) {
      b.obs(r, k) = static_cast<Scalar>(t.obs[static_cast<std::size_t>(r)]);
      b.next_obs(r, k) = static_cast<Scalar>(t.next_obs[static_cast<std::size_t>(r)]);
    }
    b.actions.push_back(t.action);
    b.rewards.push_back(t.reward);
    b.terminal.push_back(t.terminal);
  }
  b.weights = sample.weights;
  return b;
}

// y = r + gamma * max_a' Q_target(s', a'), or y = r on terminal transitions.
template <typename Scalar>
std::vector<double> bellman_targets(const Mlp<Scalar>& target_net, const TdBatch<Scalar>& batch, double gamma) {
  const auto next_q = target_net.forward(batch.next_obs);
  std::vector<double> y(batch.actions.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    y[k] = batch.rewards[k];
    if (!batch.terminal[k]) y[k] += gamma * static_cast<double>(next_q.col(static_cast<Eigen::Index>(k)).maxCoeff());
  }
  return y;
}

template <typename Scalar>
struct TdResult {
  typename Mlp<Scalar>::Gradients grads;
  double loss = 0.0;
  std::vector<double> td_errors;
};

// Importance-weighted mean squared TD error on the taken actions and its
// gradient with respect to every parameter of `net`.
template <typename Scalar>
TdResult<Scalar> td_loss_and_gradient(const Mlp<Scalar>& net, const TdBatch<Scalar>& batch,
                                      const std::vector<double>& targets) {
  TdResult<Scalar> res;
  const std::size_t n = batch.actions.size();
  res.td_errors.resize(n);
  res.grads = net.backward(batch.obs, [&](const typename Mlp<Scalar>::Matrix& q) {
    typename Mlp<Scalar>::Matrix grad = Mlp<Scalar>::Matrix::Zero(q.rows(), q.cols());
    double loss = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto col = static_cast<Eigen::Index>(k);
      const double err = static_cast<double>(q(batch.actions[k], col)) - targets[k];
      res.td_errors[k] = err;
      loss += batch.weights[k] * err * err;
      grad(batch.actions[k], col) = static_cast<Scalar>(2.0 * batch.weights[k] * err / static_cast<double>(n));
    }
    res.loss = loss / static_cast<double>(n);
    return grad;
  });
  return res;
}

// One gradient step. Returns |TD error| + 1e-6 per sample as new priorities.
template <typename Scalar>
std::vector<double> td_update(Mlp<Scalar>& net, const Mlp<Scalar>& target_net, const TdBatch<Scalar>& batch,
                              double gamma, Adam<Scalar>& optimizer) {
  const auto targets = bellman_targets(target_net, batch, gamma);
  auto res = td_loss_and_gradient(net, batch, targets);
  if (!std::isfinite(res.loss))
    throw NonFiniteLoss("non-finite TD loss after " + std::to_string(optimizer.steps()) + " updates");
  optimizer.step(net, res.grads);
  if (!net.all_finite()) throw NonFiniteLoss("non-finite parameters after update " + std::to_string(optimizer.steps()));
  std::vector<double> priorities(res.td_errors.size());
  for (std::size_t k = 0; k < priorities.size(); ++k) priorities[k] = std::abs(res.td_errors[k]) + 1e-6;
  return priorities;
}

// One virtual agent: online and target networks, optimizer and its own replay.
template <typename Scalar = float>
class DqnAgent {
 public:
  using Net = Mlp<Scalar>;

  DqnAgent(std::vector<int> layer_dims, const TrainConfig& cfg, Rng& init_rng)
      : online_(Net::random(std::move(layer_dims), init_rng)),
        target_(online_),
        optimizer_(online_, cfg.learning_rate),
        replay_(static_cast<std::size_t>(cfg.buffer_size), cfg.priority_alpha),
        gamma_(cfg.gamma),
        batch_(static_cast<std::size_t>(cfg.batch_size)),
        sync_every_(cfg.target_sync_steps) {}

  explicit DqnAgent(Net net) : online_(std::move(net)), target_(online_), replay_(1, 0.0) {}

  const Net& network() const { return online_; }
  Net& network() { return online_; }
  const Net& target_network() const { return target_; }
  const PrioritizedReplay& replay() const { return replay_; }
  long updates() const { return updates_; }

  std::size_t act(std::span<const float> obs, double epsilon, Rng& rng) const {
    return select_action(online_, obs, epsilon, rng);
  }

  std::size_t greedy(std::span<const float> obs) const {
    Rng unused(0);
    return select_action(online_, obs, 0.0, unused);
  }

  void remember(Transition t) { replay_.push(std::move(t)); }

  // Trains once if the buffer holds a full batch. Returns whether it did.
  bool learn(double beta, Rng& rng) {
    if (replay_.size() < batch_) return false;
    const auto sample = replay_.sample(batch_, beta, rng);
    const auto batch = gather_batch<Scalar>(replay_, sample);
    const auto priorities = td_update(online_, target_, batch, gamma_, optimizer_);
    for (std::size_t k = 0; k < priorities.size(); ++k) replay_.set_priority(sample.indices[k], priorities[k]);
    if (++updates_ % sync_every_ == 0) target_ = online_;
    return true;
  }

 private:
  Net online_;
  Net target_;
  Adam<Scalar> optimizer_;
  PrioritizedReplay replay_;
  double gamma_ = 0.95;
  std::size_t batch_ = 32;
  long sync_every_ = 200;
  long updates_ = 0;
};

}  // namespace uavslice::learn
