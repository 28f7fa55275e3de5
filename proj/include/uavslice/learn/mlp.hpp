#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "uavslice/errors.hpp"
#include "uavslice/rng.hpp"

namespace uavslice::learn {

// Fully connected network: rectifier on hidden layers, identity on the output.
// Column-major batches: an input batch is (in x B).
template <typename Scalar>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Mlp() = default;

  // Zero-initialized.
  explicit Mlp(std::vector<int> layer_dims) : dims_(std::move(layer_dims)) {
    if (dims_.size() < 2) throw DimensionMismatch("an Mlp needs at least input and output sizes");
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
      if (dims_[l] <= 0 || dims_[l + 1] <= 0) throw DimensionMismatch("layer sizes must be positive");
      weights_.push_back(Matrix::Zero(dims_[l + 1], dims_[l]));
      biases_.push_back(Vector::Zero(dims_[l + 1]));
    }
  }

  // He-uniform weights, zero biases.
  static Mlp random(std::vector<int> layer_dims, Rng& rng) {
    Mlp net(std::move(layer_dims));
    for (auto& w : net.weights_) {
      const double limit = std::sqrt(6.0 / static_cast<double>(w.cols()));
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = static_cast<Scalar>(rng.uniform(-limit, limit));
    }
    return net;
  }

  const std::vector<int>& layer_dims() const { return dims_; }
  std::size_t layers() const { return weights_.size(); }
  int input_size() const { return dims_.front(); }
  int output_size() const { return dims_.back(); }

  Matrix& weight(std::size_t l) { return weights_[l]; }
  const Matrix& weight(std::size_t l) const { return weights_[l]; }
  Vector& bias(std::size_t l) { return biases_[l]; }
  const Vector& bias(std::size_t l) const { return biases_[l]; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
    return n;
  }

  // Visits every parameter in checkpoint order: per layer, weights row-major
  // then biases.
  template <typename Fn>
  void for_each_parameter(Fn&& fn) {
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      auto& w = weights_[l];
      for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c) fn(w(r, c));
      for (Eigen::Index r = 0; r < biases_[l].size(); ++r) fn(biases_[l](r));
    }
  }

  bool all_finite() const {
    for (std::size_t l = 0; l < weights_.size(); ++l)
      if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
    return true;
  }

  Matrix forward(const Matrix& input) const {
    check_input(input.rows());
    Matrix h = input;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Matrix z = weights_[l] * h;
      z.colwise() += biases_[l];
      if (l + 1 < weights_.size()) z = z.cwiseMax(Scalar(0));
      h = std::move(z);
    }
    return h;
  }

  Vector forward(const Vector& input) const {
    Matrix m = forward(Matrix(input));
    return m.col(0);
  }

  struct Gradients {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
  };

  // Forward pass retaining activations, then backpropagation of
  // d(loss)/d(output) supplied by `output_grad_fn(output) -> Matrix`.
  template <typename OutputGradFn>
  Gradients backward(const Matrix& input, OutputGradFn&& output_grad_fn) const {
    check_input(input.rows());
    const std::size_t n = weights_.size();
    std::vector<Matrix> acts;
    acts.reserve(n + 1);
    acts.push_back(input);
    for (std::size_t l = 0; l < n; ++l) {
      Matrix z = weights_[l] * acts.back();
      z.colwise() += biases_[l];
      if (l + 1 < n) z = z.cwiseMax(Scalar(0));
      acts.push_back(std::move(z));
    }
    Matrix delta = output_grad_fn(acts.back());
    Gradients g;
    g.weights.resize(n);
    g.biases.resize(n);
    for (std::size_t l = n; l-- > 0;) {
      g.weights[l].noalias() = delta * acts[l].transpose();
      g.biases[l] = delta.rowwise().sum();
      if (l > 0) {
        Matrix back = weights_[l].transpose() * delta;
        // Rectifier derivative from the post-activation values.
        delta = back.cwiseProduct((acts[l].array() > Scalar(0)).template cast<Scalar>().matrix());
      }
    }
    return g;
  }

 private:
  void check_input(Eigen::Index rows) const {
    if (weights_.empty()) throw DimensionMismatch("empty network");
    if (rows != dims_.front())
      throw DimensionMismatch("input has " + std::to_string(rows) + " rows, network expects " +
                              std::to_string(dims_.front()));
  }

  std::vector<int> dims_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
};

// Adaptive moment estimation over an Mlp's parameters.
template <typename Scalar>
class Adam {
 public:
  using Net = Mlp<Scalar>;

  Adam() = default;
  Adam(const Net& net, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (std::size_t l = 0; l < net.layers(); ++l) {
      mw_.push_back(Net::Matrix::Zero(net.weight(l).rows(), net.weight(l).cols()));
      vw_.push_back(Net::Matrix::Zero(net.weight(l).rows(), net.weight(l).cols()));
      mb_.push_back(Net::Vector::Zero(net.bias(l).size()));
      vb_.push_back(Net::Vector::Zero(net.bias(l).size()));
    }
  }

  void step(Net& net, const typename Net::Gradients& g) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    const auto b1 = static_cast<Scalar>(beta1_);
    const auto b2 = static_cast<Scalar>(beta2_);
    const auto step_size = static_cast<Scalar>(lr_ * std::sqrt(c2) / c1);
    const auto eps_hat = static_cast<Scalar>(eps_ * std::sqrt(c2));
    for (std::size_t l = 0; l < net.layers(); ++l) {
      update(net.weight(l), mw_[l], vw_[l], g.weights[l], b1, b2, step_size, eps_hat);
      update(net.bias(l), mb_[l], vb_[l], g.biases[l], b1, b2, step_size, eps_hat);
    }
  }

  long steps() const { return t_; }

 private:
  template <typename P, typename G>
  static void update(P& param, P& m, P& v, const G& grad, Scalar b1, Scalar b2, Scalar step_size, Scalar eps_hat) {
    m = b1 * m + (Scalar(1) - b1) * grad;
    v = b2 * v + (Scalar(1) - b2) * grad.cwiseProduct(grad);
    param.array() -= step_size * m.array() / (v.array().sqrt() + eps_hat);
  }

  double lr_ = 1e-4;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long t_ = 0;
  std::vector<typename Net::Matrix> mw_, vw_;
  std::vector<typename Net::Vector> mb_, vb_;
};

}  // namespace uavslice::learn
