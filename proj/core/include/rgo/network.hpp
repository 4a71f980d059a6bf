#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rgo/matrix.hpp"
#include "rgo/rng.hpp"

namespace rgo {

enum class Activation { relu, identity };

struct NetworkSpec {
  // input width, hidden widths..., output width
  std::vector<std::size_t> layer_widths;
  Activation hidden_activation = Activation::relu;
  std::uint64_t init_seed = 0;
  double init_scale = 1.0;

  std::size_t num_layers() const { return layer_widths.empty() ? 0 : layer_widths.size() - 1; }
  std::size_t input_width() const { return layer_widths.front(); }
  std::size_t output_width() const { return layer_widths.back(); }
  void validate() const;
};

// Fully connected network. weights[l] maps layer_widths[l] -> layer_widths[l+1].
struct Network {
  NetworkSpec spec;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  std::size_t num_layers() const { return weights.size(); }
};

// One supervised sample.
struct Sample {
  Vector x;
  int label = 0;
};

// Activations recorded by a forward pass. For weight layer l (0-based):
//   pre[l]       = W_l * (input to l) + b_l
//   post[l]      = activation(pre[l])            (hidden layers only)
//   encoded[l]   = post[l] permuted by the task's encoding layer; this is
//                  the value fed to layer l+1    (hidden layers only)
// The final pre-activation is the logits vector; no activation or encoding
// is applied on top of it, and none is applied to the raw input either.
struct ForwardCache {
  Vector input;
  std::vector<Vector> pre;
  std::vector<Vector> post;
  std::vector<Vector> encoded;
  int task = 0;

  const Vector& layer_input(std::size_t layer) const {
    return layer == 0 ? input : encoded[layer - 1];
  }
};

// Per-layer gradients of a scalar loss. deltas[l] is the gradient at the
// pre-activation of layer l; bias_grads[l] equals deltas[l] and
// weight_grads[l] == outer(deltas[l], inputs[l]) by construction. inputs[l]
// keeps the vector the layer consumed so the projector can re-form the
// weight gradient from a projected delta without a matrix-matrix product.
struct LayerGrads {
  std::vector<Matrix> weight_grads;
  std::vector<Vector> bias_grads;
  std::vector<Vector> deltas;
  std::vector<Vector> inputs;

  std::size_t num_layers() const { return weight_grads.size(); }
};

// Weights drawn uniform in [-init_scale/sqrt(fan_in), +init_scale/sqrt(fan_in)]
// from DetRng(init_seed), row-major layer by layer; biases zero.
Network init_network(const NetworkSpec& spec);

// Task-seeded feature permutation for one hidden layer. Seed mixes the task
// descriptor with the layer index, so it is fixed for all time per
// (layer, task, width).
Permutation fel_permutation(std::size_t layer, int task, std::size_t width);

std::pair<Vector, ForwardCache> forward(const Network& net, const Vector& x, int task);

// Reverse-mode chain rule from dlogits; encoding permutations are inverted
// on the way down.
LayerGrads backward(const Network& net, const ForwardCache& cache, const Vector& dlogits);

struct LossGrad {
  double loss = 0.0;
  Vector dlogits;
};

// Softmax cross entropy with max-subtraction; dlogits = softmax - onehot.
LossGrad softmax_ce_loss(const Vector& logits, std::size_t label);

// C x C curvature of the loss in logit space: a_i*delta_ij - a_i*a_j.
// Symmetric, PSD, rows sum to zero.
Matrix softmax_second_derivative(const Vector& logits);

// Gradients of the single logit `cls` w.r.t. every pre-activation, i.e.
// backward run with dlogits = onehot(cls); returns the delta sequence.
std::vector<Vector> logit_backprop(const Network& net, const ForwardCache& cache, std::size_t cls);

// All parameters as one flat vector (weights row-major then bias, per layer).
Vector flatten_parameters(const Network& net);

}  // namespace rgo
