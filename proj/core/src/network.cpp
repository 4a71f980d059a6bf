#include "rgo/network.hpp"

#include <cmath>
#include <stdexcept>

namespace rgo {

namespace {

double activate(Activation act, double z) {
  return act == Activation::relu ? (z > 0.0 ? z : 0.0) : z;
}

// Subgradient at 0 is 0 for relu.
double activate_deriv(Activation act, double z) {
  return act == Activation::relu ? (z > 0.0 ? 1.0 : 0.0) : 1.0;
}

}  // namespace

void NetworkSpec::validate() const {
  if (layer_widths.size() < 2)
    throw std::invalid_argument("NetworkSpec: need at least input and output widths");
  for (std::size_t w : layer_widths)
    if (w < 1) throw std::invalid_argument("NetworkSpec: all layer widths must be >= 1");
}

Network init_network(const NetworkSpec& spec) {
  spec.validate();
  Network net;
  net.spec = spec;
  DetRng rng(spec.init_seed);
  for (std::size_t l = 0; l + 1 < spec.layer_widths.size(); ++l) {
    const std::size_t in = spec.layer_widths[l];
    const std::size_t out = spec.layer_widths[l + 1];
    Matrix w(out, in);
    const double bound = spec.init_scale / std::sqrt(static_cast<double>(in));
    for (std::size_t i = 0; i < out; ++i)
      for (std::size_t j = 0; j < in; ++j) w(i, j) = rng.next_uniform(-bound, bound);
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(out, 0.0);
  }
  return net;
}

Permutation fel_permutation(std::size_t layer, int task, std::size_t width) {
  const std::uint64_t seed =
      static_cast<std::uint64_t>(task) * 0x100000001B3ULL ^ static_cast<std::uint64_t>(layer);
  DetRng rng(seed);
  return rng_permutation(rng, width);
}

std::pair<Vector, ForwardCache> forward(const Network& net, const Vector& x, int task) {
  if (x.size() != net.spec.input_width())
    throw std::invalid_argument("forward: input width mismatch");

  ForwardCache cache;
  cache.input = x;
  cache.task = task;
  const std::size_t layers = net.num_layers();
  cache.pre.resize(layers);
  cache.post.resize(layers > 0 ? layers - 1 : 0);
  cache.encoded.resize(layers > 0 ? layers - 1 : 0);

  const Vector* in = &x;
  for (std::size_t l = 0; l < layers; ++l) {
    Vector z = mat_vec(net.weights[l], *in);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += net.biases[l][i];
    cache.pre[l] = std::move(z);
    if (l + 1 == layers) break;  // logits stay raw
    Vector h(cache.pre[l].size());
    for (std::size_t i = 0; i < h.size(); ++i)
      h[i] = activate(net.spec.hidden_activation, cache.pre[l][i]);
    cache.post[l] = std::move(h);
    cache.encoded[l] = apply_permutation(cache.post[l], fel_permutation(l, task, cache.post[l].size()));
    in = &cache.encoded[l];
  }
  return {cache.pre.back(), cache};
}

LayerGrads backward(const Network& net, const ForwardCache& cache, const Vector& dlogits) {
  const std::size_t layers = net.num_layers();
  if (dlogits.size() != net.spec.output_width())
    throw std::invalid_argument("backward: dlogits width mismatch");

  LayerGrads grads;
  grads.weight_grads.resize(layers);
  grads.bias_grads.resize(layers);
  grads.deltas.resize(layers);
  grads.inputs.resize(layers);

  Vector delta = dlogits;
  for (std::size_t l = layers; l-- > 0;) {
    grads.inputs[l] = cache.layer_input(l);
    grads.weight_grads[l] = outer(delta, grads.inputs[l]);
    grads.bias_grads[l] = delta;
    grads.deltas[l] = delta;
    if (l == 0) break;
    // Gradient w.r.t. the encoded activation below, then undo the encoding
    // permutation and the nonlinearity.
    Vector g_encoded = mat_tvec(net.weights[l], delta);
    Vector g_post = apply_inverse_permutation(
        g_encoded, fel_permutation(l - 1, cache.task, g_encoded.size()));
    delta.assign(g_post.size(), 0.0);
    for (std::size_t i = 0; i < g_post.size(); ++i)
      delta[i] = g_post[i] * activate_deriv(net.spec.hidden_activation, cache.pre[l - 1][i]);
  }
  return grads;
}

LossGrad softmax_ce_loss(const Vector& logits, std::size_t label) {
  if (label >= logits.size())
    throw std::invalid_argument("softmax_ce_loss: label out of range");
  double zmax = logits[0];
  for (double z : logits) zmax = std::max(zmax, z);
  double sum = 0.0;
  Vector a(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    a[i] = std::exp(logits[i] - zmax);
    sum += a[i];
  }
  for (auto& e : a) e /= sum;

  LossGrad out;
  out.loss = -std::log(a[label]);
  out.dlogits = std::move(a);
  out.dlogits[label] -= 1.0;
  return out;
}

Matrix softmax_second_derivative(const Vector& logits) {
  if (logits.size() < 2)
    throw std::invalid_argument("softmax_second_derivative: need at least 2 classes");
  double zmax = logits[0];
  for (double z : logits) zmax = std::max(zmax, z);
  double sum = 0.0;
  Vector a(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    a[i] = std::exp(logits[i] - zmax);
    sum += a[i];
  }
  for (auto& e : a) e /= sum;

  const std::size_t c = logits.size();
  Matrix h(c, c);
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t j = 0; j < c; ++j) h(i, j) = (i == j ? a[i] : 0.0) - a[i] * a[j];
  return h;
}

std::vector<Vector> logit_backprop(const Network& net, const ForwardCache& cache, std::size_t cls) {
  if (cls >= net.spec.output_width())
    throw std::invalid_argument("logit_backprop: class out of range");
  Vector onehot(net.spec.output_width(), 0.0);
  onehot[cls] = 1.0;
  return backward(net, cache, onehot).deltas;
}

Vector flatten_parameters(const Network& net) {
  Vector theta;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    theta.insert(theta.end(), net.weights[l].data().begin(), net.weights[l].data().end());
    theta.insert(theta.end(), net.biases[l].begin(), net.biases[l].end());
  }
  return theta;
}

}  // namespace rgo
