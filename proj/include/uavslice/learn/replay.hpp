#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "uavslice/errors.hpp"
#include "uavslice/rng.hpp"

namespace uavslice::learn {

struct Transition {
  std::vector<float> obs;
  int action = 0;
  float reward = 0.0f;
  std::vector<float> next_obs;
  bool terminal = false;
};

// Binary sum tree over `capacity` leaves for proportional sampling.
class SumTree {
 public:
  explicit SumTree(std::size_t capacity = 1) {
    leaves_ = 1;
    while (leaves_ < capacity) leaves_ <<= 1;
    nodes_.assign(2 * leaves_, 0.0);
  }

  void set(std::size_t i, double value) {
    std::size_t n = i + leaves_;
    nodes_[n] = value;
    for (n >>= 1; n >= 1; n >>= 1) nodes_[n] = nodes_[2 * n] + nodes_[2 * n + 1];
  }

  double get(std::size_t i) const { return nodes_[i + leaves_]; }
  double total() const { return nodes_[1]; }

  // Leaf whose cumulative interval contains `mass` in [0, total).
  std::size_t find(double mass) const {
    std::size_t n = 1;
    while (n < leaves_) {
      const double left = nodes_[2 * n];
      if (mass < left || nodes_[2 * n + 1] <= 0.0) {
        n = 2 * n;
      } else {
        mass -= left;
        n = 2 * n + 1;
      }
    }
    return n - leaves_;
  }

 private:
  std::size_t leaves_;
  std::vector<double> nodes_;
};

struct SampledBatch {
  std::vector<std::size_t> indices;
  std::vector<double> weights;  // importance weights, max-normalized over the batch
};

// FIFO ring of transitions with sampling probability proportional to
// priority^alpha.
class PrioritizedReplay {
 public:
  PrioritizedReplay(std::size_t capacity, double alpha) : capacity_(capacity), alpha_(alpha), tree_(capacity) {
    if (capacity == 0) throw ConfigError("replay capacity must be positive");
    data_.reserve(capacity);
    priority_.reserve(capacity);
  }

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  double alpha() const { return alpha_; }
  double max_priority() const { return max_priority_; }

  const Transition& at(std::size_t i) const { return data_[i]; }
  double priority(std::size_t i) const { return priority_[i]; }

  // Index of the slot written by the next push (also the oldest entry once full).
  std::size_t next_slot() const { return next_; }

  // New entries get the largest priority seen so far.
  void push(Transition t) { push(std::move(t), max_priority_); }

  void push(Transition t, double priority) {
    if (data_.size() < capacity_) {
      data_.push_back(std::move(t));
      priority_.push_back(0.0);
    } else {
      data_[next_] = std::move(t);
    }
    set_priority(next_, priority);
    next_ = (next_ + 1) % capacity_;
  }

  void set_priority(std::size_t i, double priority) {
    if (!(priority > 0.0) || !std::isfinite(priority)) throw RuntimeError("replay priorities must be positive and finite");
    priority_[i] = priority;
    max_priority_ = std::max(max_priority_, priority);
    tree_.set(i, std::pow(priority, alpha_));
  }

  double probability(std::size_t i) const { return tree_.get(i) / tree_.total(); }

  // With replacement. w_i = (N P(i))^-beta / max_j w_j.
  SampledBatch sample(std::size_t batch, double beta, Rng& rng) const {
    if (data_.size() < batch || data_.empty()) throw RuntimeError("replay buffer holds fewer transitions than the batch");
    SampledBatch out;
    out.indices.reserve(batch);
    out.weights.reserve(batch);
    const double total = tree_.total();
    const double n = static_cast<double>(data_.size());
    double max_w = 0.0;
    for (std::size_t k = 0; k < batch; ++k) {
      std::size_t i = tree_.find(rng.uniform() * total);
      if (i >= data_.size()) i = data_.size() - 1;
      const double p = tree_.get(i) / total;
      const double w = std::pow(n * p, -beta);
      out.indices.push_back(i);
      out.weights.push_back(w);
      max_w = std::max(max_w, w);
    }
    for (double& w : out.weights) w /= max_w;
    return out;
  }

 private:
  std::size_t capacity_;
  double alpha_;
  SumTree tree_;
  std::vector<Transition> data_;
  std::vector<double> priority_;
  std::size_t next_ = 0;
  double max_priority_ = 1.0;
};

}  // namespace uavslice::learn
