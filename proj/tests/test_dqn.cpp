#include <catch_amalgamated.hpp>

#include <cmath>

#include "uavslice/learn/dqn.hpp"

using namespace uavslice;
using namespace uavslice::learn;

namespace {

TdBatch<double> random_batch(Rng& rng, int in, int n, int actions) {
  TdBatch<double> b;
  b.obs.resize(in, n);
  b.next_obs.resize(in, n);
  for (Eigen::Index i = 0; i < b.obs.size(); ++i) {
    b.obs.data()[i] = rng.uniform(-1, 1);
    b.next_obs.data()[i] = rng.uniform(-1, 1);
  }
  for (int k = 0; k < n; ++k) {
    b.actions.push_back(static_cast<int>(rng.uniform_index(static_cast<std::size_t>(actions))));
    b.rewards.push_back(rng.uniform(0, 5));
    b.terminal.push_back(false);
    b.weights.push_back(rng.uniform(0.2, 1.0));
  }
  return b;
}

double loss_of(const Mlp<double>& net, const TdBatch<double>& b, const std::vector<double>& y) {
  return td_loss_and_gradient(net, b, y).loss;
}

// Max relative error between backprop and central differences (step 1e-5).
double gradient_check(Mlp<double> net, const TdBatch<double>& b, const std::vector<double>& y) {
  const auto res = td_loss_and_gradient(net, b, y);
  std::vector<double> analytic;
  for (std::size_t l = 0; l < net.layers(); ++l) {
    const auto& gw = res.grads.weights[l];
    for (Eigen::Index r = 0; r < gw.rows(); ++r)
      for (Eigen::Index c = 0; c < gw.cols(); ++c) analytic.push_back(gw(r, c));
    for (Eigen::Index r = 0; r < res.grads.biases[l].size(); ++r) analytic.push_back(res.grads.biases[l](r));
  }
  const double h = 1e-5;
  std::vector<double*> params;
  net.for_each_parameter([&](double& p) { params.push_back(&p); });
  REQUIRE(params.size() == analytic.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = *params[i];
    *params[i] = saved + h;
    const double up = loss_of(net, b, y);
    *params[i] = saved - h;
    const double down = loss_of(net, b, y);
    *params[i] = saved;
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-6});
    worst = std::max(worst, std::abs(numeric - analytic[i]) / scale);
  }
  return worst;
}

}  // namespace

TEST_CASE("epsilon schedule") {
  CHECK(epsilon_step(1.0) == Catch::Approx(0.99995).epsilon(1e-15));
  CHECK(epsilon_step(0.01) == 0.01);
  CHECK(epsilon_step(0.0100004) == 0.01);
  double e = 1.0;
  for (int i = 0; i < 200000; ++i) {
    const double next = epsilon_step(e);
    REQUIRE(next <= e);
    REQUIRE(next >= 0.01);
    e = next;
  }
}

TEST_CASE("greedy selection and tie-break") {
  const std::vector<double> a = {1, 3, 2}, b = {2, 2, 0};
  CHECK(argmax(a) == 1);
  CHECK(argmax(b) == 0);
}

TEST_CASE("epsilon one is uniform over actions") {
  Mlp<float> net({2, 5});
  net.bias(0)(3) = 10.0f;
  Rng rng(12);
  const std::vector<float> obs = {0.f, 0.f};
  std::vector<int> counts(5, 0);
  const int n = 50000;
  for (int i = 0; i < n; ++i) ++counts[select_action(net, obs, 1.0, rng)];
  for (int c : counts) CHECK(std::abs(c / double(n) - 0.2) < 0.01);
  CHECK(select_action(net, obs, 0.0, rng) == 3);
}

TEST_CASE("greedy selection draws no random numbers") {
  Mlp<float> net({2, 5});
  Rng a(1), b(1);
  const std::vector<float> obs = {1.f, 2.f};
  select_action(net, obs, 0.0, a);
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("Bellman targets") {
  Mlp<double> target({1, 2});
  target.bias(0) << 10.0, 4.0;  // max Q = 10 everywhere
  TdBatch<double> b;
  b.next_obs = Mlp<double>::Matrix::Zero(1, 2);
  b.rewards = {5.0, 3.0};
  b.terminal = {false, true};
  b.actions = {0, 0};
  const auto y = bellman_targets(target, b, 0.95);
  CHECK(y[0] == Catch::Approx(14.5));
  CHECK(y[1] == 3.0);
}

TEST_CASE("gradient check on the 10-parameter net") {
  Rng rng(2);
  auto net = Mlp<double>::random({1, 3, 1}, rng);
  REQUIRE(net.parameter_count() == 10);
  for (Eigen::Index r = 0; r < 3; ++r) net.bias(0)(r) = rng.uniform(0.1, 0.5);
  const auto b = random_batch(rng, 1, 8, 1);
  std::vector<double> y;
  for (int k = 0; k < 8; ++k) y.push_back(rng.uniform(-2, 2));
  CHECK(gradient_check(net, b, y) < 1e-4);
}

TEST_CASE("gradient check on random small nets") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const int in = 2 + static_cast<int>(rng.uniform_index(3));
    const int hidden = 3 + static_cast<int>(rng.uniform_index(4));
    const int out = 2 + static_cast<int>(rng.uniform_index(3));
    auto net = Mlp<double>::random({in, hidden, hidden, out}, rng);
    for (std::size_t l = 0; l < net.layers(); ++l)
      for (Eigen::Index r = 0; r < net.bias(l).size(); ++r) net.bias(l)(r) = rng.uniform(0.05, 0.3);
    const auto b = random_batch(rng, in, 6, out);
    std::vector<double> y;
    for (int k = 0; k < 6; ++k) y.push_back(rng.uniform(-3, 3));
    CHECK(gradient_check(net, b, y) < 1e-4);
  }
}

TEST_CASE("target network is frozen between syncs") {
  TrainConfig cfg;
  cfg.batch_size = 4;
  cfg.buffer_size = 16;
  cfg.target_sync_steps = 5;
  cfg.learning_rate = 1e-2;
  Rng init(1);
  DqnAgent<float> agent({2, 8, 3}, cfg, init);
  Rng rng(2);
  for (int i = 0; i < 16; ++i)
    agent.remember({{float(rng.uniform()), float(rng.uniform())}, int(rng.uniform_index(3)), 1.0f,
                    {float(rng.uniform()), float(rng.uniform())}, false});

  Mlp<float>::Vector probe(2);
  probe << 0.3f, 0.7f;
  const auto frozen = agent.target_network().forward(probe);
  for (int u = 1; u <= 4; ++u) {
    REQUIRE(agent.learn(0.4, rng));
    CHECK(agent.target_network().forward(probe) == frozen);
  }
  CHECK(agent.network().forward(probe) != frozen);
  agent.learn(0.4, rng);  // fifth update syncs
  CHECK(agent.target_network().forward(probe) == agent.network().forward(probe));
  CHECK(agent.updates() == 5);
  for (std::size_t i = 0; i < agent.replay().size(); ++i) CHECK(agent.replay().priority(i) > 0.0);
}

TEST_CASE("learning waits for a full batch") {
  TrainConfig cfg;
  Rng init(1), rng(2);
  DqnAgent<float> agent({2, 4, 2}, cfg, init);
  for (int i = 0; i < cfg.batch_size - 1; ++i) agent.remember({{0.f, 0.f}, 0, 1.f, {0.f, 0.f}, false});
  CHECK_FALSE(agent.learn(0.4, rng));
  agent.remember({{0.f, 0.f}, 0, 1.f, {0.f, 0.f}, false});
  CHECK(agent.learn(0.4, rng));
}

TEST_CASE("non-finite loss is reported") {
  Mlp<double> net({1, 1}), target({1, 1});
  learn::Adam<double> adam(net, 1e-3);
  TdBatch<double> b;
  b.obs = Mlp<double>::Matrix::Zero(1, 1);
  b.next_obs = Mlp<double>::Matrix::Zero(1, 1);
  b.actions = {0};
  b.rewards = {std::numeric_limits<double>::infinity()};
  b.terminal = {true};
  b.weights = {1.0};
  CHECK_THROWS_AS(td_update(net, target, b, 0.95, adam), NonFiniteLoss);
}

TEST_CASE("train config defaults and validation") {
  TrainConfig cfg;
  CHECK(cfg.gamma == 0.95);
  CHECK(cfg.buffer_size == 1000);
  CHECK(cfg.batch_size == 32);
  CHECK(cfg.learning_rate == 1e-4);
  CHECK(cfg.episodes == 5000);
  cfg.gamma = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
