// Copyright 2026 The edgesched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense multilayer perceptrons with hand-written reverse mode and Adam.
//
// A network is a value: copy it to snapshot parameters. forward() with a
// ForwardCache records what backward() needs; backward() accumulates into a
// Gradients object, so one network can be applied many times (shared GNN
// blocks) and the parameter gradients of every application add up.

#ifndef EDGESCHED_NN_HPP_
#define EDGESCHED_NN_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "edgesched/common.hpp"

namespace edgesched::nn {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

enum class Activation : std::uint32_t {
  kLinear = 0,
  kRelu = 1,
  kReluPlusOne = 2,  // max(0, x) + 1: strictly positive outputs
};

template <typename Scalar>
struct DenseLayer {
  Matrix<Scalar> weights;  // out x in
  Vector<Scalar> bias;
  Activation activation = Activation::kLinear;
};

template <typename Scalar>
class Mlp {
 public:
  Mlp() = default;

  /// He-uniform weights (bound sqrt(6 / fan_in)), zero biases.
  /// layer_sizes = {input, hidden..., output}; one activation per layer.
  Mlp(const std::vector<int>& layer_sizes, const std::vector<Activation>& activations,
      std::uint64_t seed) {
    init_shapes(layer_sizes, activations);
    Rng rng(seed);
    for (auto& layer : layers_) {
      const Scalar bound = std::sqrt(Scalar(6) / Scalar(layer.weights.cols()));
      for (Eigen::Index i = 0; i < layer.weights.size(); ++i) {
        layer.weights.data()[i] = bound * (Scalar(2) * Scalar(uniform01(rng)) - Scalar(1));
      }
    }
  }

  static Mlp zeros(const std::vector<int>& layer_sizes,
                   const std::vector<Activation>& activations) {
    Mlp net;
    net.init_shapes(layer_sizes, activations);
    return net;
  }

  explicit Mlp(std::vector<DenseLayer<Scalar>> layers) : layers_(std::move(layers)) {
    require(!layers_.empty(), "an Mlp needs at least one layer");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      require(layers_[i].bias.size() == layers_[i].weights.rows(), "bias/weight row mismatch");
      if (i > 0) {
        require(layers_[i].weights.cols() == layers_[i - 1].weights.rows(),
                "layer widths do not chain");
      }
    }
  }

  int input_size() const { return static_cast<int>(layers_.front().weights.cols()); }
  int output_size() const { return static_cast<int>(layers_.back().weights.rows()); }
  bool empty() const { return layers_.empty(); }

  std::vector<int> layer_sizes() const {
    std::vector<int> sizes;
    if (layers_.empty()) return sizes;
    sizes.push_back(input_size());
    for (const auto& l : layers_) sizes.push_back(static_cast<int>(l.weights.rows()));
    return sizes;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    return n;
  }

  std::vector<DenseLayer<Scalar>>& layers() { return layers_; }
  const std::vector<DenseLayer<Scalar>>& layers() const { return layers_; }

  bool operator==(const Mlp& other) const {
    if (layers_.size() != other.layers_.size()) return false;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const auto& a = layers_[i];
      const auto& b = other.layers_[i];
      if (a.activation != b.activation || a.weights.rows() != b.weights.rows() ||
          a.weights.cols() != b.weights.cols() || a.weights != b.weights || a.bias != b.bias) {
        return false;
      }
    }
    return true;
  }

 private:
  void init_shapes(const std::vector<int>& layer_sizes,
                   const std::vector<Activation>& activations) {
    require(layer_sizes.size() >= 2, "layer_sizes needs input and output widths");
    require(activations.size() == layer_sizes.size() - 1, "one activation per layer");
    layers_.clear();
    for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
      require(layer_sizes[i] > 0 && layer_sizes[i + 1] > 0, "layer widths must be > 0");
      DenseLayer<Scalar> layer;
      layer.weights = Matrix<Scalar>::Zero(layer_sizes[i + 1], layer_sizes[i]);
      layer.bias = Vector<Scalar>::Zero(layer_sizes[i + 1]);
      layer.activation = activations[i];
      layers_.push_back(std::move(layer));
    }
  }

  std::vector<DenseLayer<Scalar>> layers_;
};

template <typename Scalar>
struct ForwardCache {
  std::vector<Vector<Scalar>> inputs;           // input of each layer
  std::vector<Vector<Scalar>> pre_activations;  // affine output of each layer
};

template <typename Scalar>
struct Gradients {
  std::vector<Matrix<Scalar>> weights;
  std::vector<Vector<Scalar>> bias;

  static Gradients zeros_like(const Mlp<Scalar>& net) {
    Gradients g;
    for (const auto& l : net.layers()) {
      g.weights.push_back(Matrix<Scalar>::Zero(l.weights.rows(), l.weights.cols()));
      g.bias.push_back(Vector<Scalar>::Zero(l.bias.size()));
    }
    return g;
  }

  void set_zero() {
    for (auto& w : weights) w.setZero();
    for (auto& b : bias) b.setZero();
  }

  Scalar squared_norm() const {
    Scalar s(0);
    for (const auto& w : weights) s += w.squaredNorm();
    for (const auto& b : bias) s += b.squaredNorm();
    return s;
  }

  Gradients& operator*=(Scalar k) {
    for (auto& w : weights) w *= k;
    for (auto& b : bias) b *= k;
    return *this;
  }
};

namespace detail {

template <typename Scalar>
Vector<Scalar> activate(const Vector<Scalar>& pre, Activation act) {
  switch (act) {
    case Activation::kLinear: return pre;
    case Activation::kRelu: return pre.cwiseMax(Scalar(0));
    case Activation::kReluPlusOne: return pre.cwiseMax(Scalar(0)).array() + Scalar(1);
  }
  return pre;
}

template <typename Scalar>
void check_input(const Mlp<Scalar>& net, Eigen::Index size) {
  if (net.empty() || size != net.input_size()) {
    throw ContractError("Mlp input has " + std::to_string(size) + " entries, expected " +
                        std::to_string(net.empty() ? 0 : net.input_size()));
  }
}

}  // namespace detail

template <typename Scalar>
Vector<Scalar> forward(const Mlp<Scalar>& net, const Vector<Scalar>& input) {
  detail::check_input(net, input.size());
  Vector<Scalar> h = input;
  for (const auto& layer : net.layers()) {
    Vector<Scalar> pre = layer.weights * h + layer.bias;
    h = detail::activate(pre, layer.activation);
  }
  return h;
}

template <typename Scalar>
Vector<Scalar> forward(const Mlp<Scalar>& net, const Vector<Scalar>& input,
                       ForwardCache<Scalar>& cache) {
  detail::check_input(net, input.size());
  cache.inputs.clear();
  cache.pre_activations.clear();
  Vector<Scalar> h = input;
  for (const auto& layer : net.layers()) {
    cache.inputs.push_back(h);
    Vector<Scalar> pre = layer.weights * h + layer.bias;
    h = detail::activate(pre, layer.activation);
    cache.pre_activations.push_back(std::move(pre));
  }
  return h;
}

/// Accumulates d(loss)/d(params) into `grads` given d(loss)/d(output), and
/// returns d(loss)/d(input).
template <typename Scalar>
Vector<Scalar> backward(const Mlp<Scalar>& net, const ForwardCache<Scalar>& cache,
                        const Vector<Scalar>& output_grad, Gradients<Scalar>& grads) {
  const auto& layers = net.layers();
  require(cache.inputs.size() == layers.size(), "forward cache does not match network");
  require(grads.weights.size() == layers.size(), "gradient buffer does not match network");
  if (output_grad.size() != net.output_size()) {
    throw ContractError("output gradient has " + std::to_string(output_grad.size()) +
                        " entries, expected " + std::to_string(net.output_size()));
  }
  Vector<Scalar> delta = output_grad;
  for (std::size_t k = layers.size(); k-- > 0;) {
    const auto& layer = layers[k];
    if (layer.activation != Activation::kLinear) {
      const auto& pre = cache.pre_activations[k];
      for (Eigen::Index i = 0; i < delta.size(); ++i) {
        if (!(pre[i] > Scalar(0))) delta[i] = Scalar(0);
      }
    }
    grads.weights[k].noalias() += delta * cache.inputs[k].transpose();
    grads.bias[k] += delta;
    delta = layer.weights.transpose() * delta;
  }
  return delta;
}

/// Flat view over parameters: layer by layer, weights (column-major) then bias.
template <typename Scalar>
Scalar& parameter_at(Mlp<Scalar>& net, std::size_t index) {
  for (auto& l : net.layers()) {
    const auto nw = static_cast<std::size_t>(l.weights.size());
    if (index < nw) return l.weights.data()[index];
    index -= nw;
    const auto nb = static_cast<std::size_t>(l.bias.size());
    if (index < nb) return l.bias.data()[index];
    index -= nb;
  }
  throw ContractError("parameter index out of range");
}

template <typename Scalar>
Scalar gradient_at(const Gradients<Scalar>& grads, std::size_t index) {
  for (std::size_t k = 0; k < grads.weights.size(); ++k) {
    const auto nw = static_cast<std::size_t>(grads.weights[k].size());
    if (index < nw) return grads.weights[k].data()[index];
    index -= nw;
    const auto nb = static_cast<std::size_t>(grads.bias[k].size());
    if (index < nb) return grads.bias[k].data()[index];
    index -= nb;
  }
  throw ContractError("gradient index out of range");
}

template <typename Scalar>
struct AdamState {
  Scalar learning_rate = Scalar(1e-3);
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar epsilon = Scalar(1e-8);
  std::int64_t step = 0;
  Gradients<Scalar> first_moment;
  Gradients<Scalar> second_moment;

  AdamState() = default;
  AdamState(const Mlp<Scalar>& net, Scalar lr)
      : learning_rate(lr),
        first_moment(Gradients<Scalar>::zeros_like(net)),
        second_moment(Gradients<Scalar>::zeros_like(net)) {}
};

/// One bias-corrected Adam descent step: params -= lr * m_hat / (sqrt(v_hat) + eps).
template <typename Scalar>
void adam_step(AdamState<Scalar>& state, Mlp<Scalar>& net, const Gradients<Scalar>& grads) {
  auto& layers = net.layers();
  require(grads.weights.size() == layers.size() &&
              state.first_moment.weights.size() == layers.size(),
          "Adam state does not match network");
  ++state.step;
  const Scalar c1 = Scalar(1) - std::pow(state.beta1, Scalar(state.step));
  const Scalar c2 = Scalar(1) - std::pow(state.beta2, Scalar(state.step));
  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = state.beta1 * m + (Scalar(1) - state.beta1) * g;
    v = state.beta2 * v + (Scalar(1) - state.beta2) * g.cwiseProduct(g);
    param.array() -= state.learning_rate * (m.array() / c1) /
                     ((v.array() / c2).sqrt() + state.epsilon);
  };
  for (std::size_t k = 0; k < layers.size(); ++k) {
    update(layers[k].weights, state.first_moment.weights[k], state.second_moment.weights[k],
           grads.weights[k]);
    update(layers[k].bias, state.first_moment.bias[k], state.second_moment.bias[k],
           grads.bias[k]);
  }
}

/// Numerically stable softmax.
template <typename Scalar>
Vector<Scalar> softmax(const Vector<Scalar>& logits) {
  require(logits.size() > 0, "softmax of an empty vector");
  Vector<Scalar> e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

/// Normalizes positive logits over the entries the binary mask allows:
/// out_j = logits_j mask_j / sum_k logits_k mask_k. Masked entries are
/// exactly zero.
template <typename Scalar>
Vector<Scalar> masked_softmax(const Vector<Scalar>& logits, const Vector<Scalar>& mask) {
  require(logits.size() == mask.size(), "logits and mask sizes differ");
  require((logits.array() > Scalar(0)).all(), "masked_softmax needs strictly positive logits");
  Vector<Scalar> kept = logits.cwiseProduct(mask);
  const Scalar total = kept.sum();
  if (!(total > Scalar(0))) throw ContractError("mask excludes every action");
  return kept / total;
}

// Checkpoint format (little-endian):
//   "EDGENN01" | u32 layer_count | per layer: u32 rows, u32 cols, u32 activation
//   | per layer: rows*cols f64 weights in row-major order, then rows f64 bias.
void save_mlp(std::ostream& out, const Mlp<double>& net);
Mlp<double> load_mlp(std::istream& in);
void save_mlp(const std::string& path, const Mlp<double>& net);
Mlp<double> load_mlp(const std::string& path);

}  // namespace edgesched::nn

#endif  // EDGESCHED_NN_HPP_
