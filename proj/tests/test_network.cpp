#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rgo/network.hpp"
#include "rgo/verify.hpp"

using namespace rgo;

namespace {

NetworkSpec small_spec(std::vector<std::size_t> widths, std::uint64_t seed = 1,
                       Activation act = Activation::relu, double scale = 1.0) {
  NetworkSpec spec;
  spec.layer_widths = std::move(widths);
  spec.hidden_activation = act;
  spec.init_seed = seed;
  spec.init_scale = scale;
  return spec;
}

Vector random_input(std::uint64_t seed, std::size_t n) {
  DetRng rng(seed);
  Vector x(n);
  for (auto& e : x) e = rng.next_uniform(-1.0, 1.0);
  return x;
}

}  // namespace

TEST_CASE("init: zero scale gives zero weights") {
  const Network net = init_network(small_spec({4, 3, 2}, 1, Activation::relu, 0.0));
  for (const Matrix& w : net.weights)
    for (double e : w.data()) CHECK(e == 0.0);
}

TEST_CASE("init: deterministic per seed") {
  const Network a = init_network(small_spec({4, 8, 3}, 9));
  const Network b = init_network(small_spec({4, 8, 3}, 9));
  const Network c = init_network(small_spec({4, 8, 3}, 10));
  for (std::size_t l = 0; l < a.num_layers(); ++l) {
    CHECK(a.weights[l] == b.weights[l]);
    CHECK(a.biases[l] == b.biases[l]);
  }
  CHECK(a.weights[0] != c.weights[0]);
}

TEST_CASE("init: weight shapes follow the layer widths and biases start at zero") {
  const Network net = init_network(small_spec({4, 8, 3}));
  REQUIRE(net.num_layers() == 2);
  CHECK(net.weights[0].rows() == 8);
  CHECK(net.weights[0].cols() == 4);
  CHECK(net.weights[1].rows() == 3);
  CHECK(net.weights[1].cols() == 8);
  for (const Vector& b : net.biases)
    for (double e : b) CHECK(e == 0.0);
}

TEST_CASE("init: rejects degenerate specs") {
  CHECK_THROWS_AS(init_network(small_spec({5})), std::invalid_argument);
  CHECK_THROWS_AS(init_network(small_spec({5, 0, 2})), std::invalid_argument);
}

TEST_CASE("fel: width one is the identity") {
  CHECK(fel_permutation(0, 3, 1) == Permutation{0});
}

TEST_CASE("fel: deterministic per (layer, task)") {
  CHECK(fel_permutation(0, 5, 48) == fel_permutation(0, 5, 48));
  CHECK(fel_permutation(3, 17, 20) == fel_permutation(3, 17, 20));
}

TEST_CASE("fel: different tasks get different wirings") {
  CHECK(fel_permutation(0, 1, 64) != fel_permutation(0, 2, 64));
  CHECK(fel_permutation(0, 1, 64) != fel_permutation(1, 1, 64));
}

TEST_CASE("forward: zero weights leave only the output bias") {
  Network net = init_network(small_spec({4, 3, 2}, 1, Activation::relu, 0.0));
  net.biases[1] = {0.25, -0.75};
  const auto [logits, cache] = forward(net, {1.0, -2.0, 3.0, 4.0}, 2);
  CHECK(logits == Vector{0.25, -0.75});
}

TEST_CASE("forward: identity net exposes the encoding permutation") {
  const std::size_t n = 6;
  Network net = init_network(small_spec({n, n, n}, 1, Activation::identity, 0.0));
  net.weights[0] = Matrix::identity(n);
  net.weights[1] = Matrix::identity(n);
  const Vector x = random_input(21, n);
  const int task = 4;
  const auto [logits, cache] = forward(net, x, task);
  CHECK(logits == apply_permutation(x, fel_permutation(0, task, n)));
}

TEST_CASE("forward: cached post-activations are the activated pre-activations") {
  const Network net = init_network(small_spec({5, 7, 4, 3}, 3));
  const auto [logits, cache] = forward(net, random_input(8, 5), 1);
  REQUIRE(cache.post.size() == 2);
  for (std::size_t l = 0; l < cache.post.size(); ++l)
    for (std::size_t i = 0; i < cache.post[l].size(); ++i)
      CHECK(cache.post[l][i] == std::max(0.0, cache.pre[l][i]));
}

TEST_CASE("forward: rejects wrong input width") {
  const Network net = init_network(small_spec({4, 3, 2}));
  CHECK_THROWS_AS(forward(net, Vector(5, 0.0), 1), std::invalid_argument);
}

TEST_CASE("backward: zero upstream gradient zeroes everything") {
  const Network net = init_network(small_spec({4, 3, 2}, 5));
  const auto [logits, cache] = forward(net, random_input(6, 4), 1);
  const LayerGrads grads = backward(net, cache, {0.0, 0.0});
  for (std::size_t l = 0; l < grads.num_layers(); ++l) {
    for (double e : grads.weight_grads[l].data()) CHECK(e == 0.0);
    for (double e : grads.bias_grads[l]) CHECK(e == 0.0);
  }
}

TEST_CASE("backward: single linear layer has outer-product structure") {
  const Network net = init_network(small_spec({3, 2}, 2));
  const Vector x = {0.5, -1.0, 2.0};
  const auto [logits, cache] = forward(net, x, 1);
  const LayerGrads grads = backward(net, cache, {1.0, 0.0});
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(grads.weight_grads[0](0, j) == x[j]);
    CHECK(grads.weight_grads[0](1, j) == 0.0);
  }
  CHECK(grads.bias_grads[0] == Vector{1.0, 0.0});
}

TEST_CASE("backward: matches central finite differences with encoding active") {
  const double worst = gradient_check_max_rel_err(small_spec({10, 8, 6, 4}, 13), 3, 77, 10);
  CHECK(worst < 1e-6);
}

TEST_CASE("backward: weight grads reconstruct from deltas bitwise") {
  const Network net = init_network(small_spec({9, 7, 5}, 5));
  const auto [logits, cache] = forward(net, random_input(30, 9), 4);
  const LayerGrads grads = backward(net, cache, softmax_ce_loss(logits, 1).dlogits);
  for (std::size_t l = 0; l < grads.num_layers(); ++l) {
    CHECK(grads.weight_grads[l] == outer(grads.deltas[l], grads.inputs[l]));
    CHECK(grads.bias_grads[l] == grads.deltas[l]);
  }
}

TEST_CASE("softmax loss: uniform two-logit case") {
  const LossGrad lg = softmax_ce_loss({0.0, 0.0}, 0);
  CHECK(lg.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(lg.dlogits[0] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(lg.dlogits[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("softmax loss: extreme logits stay finite") {
  const LossGrad lg = softmax_ce_loss({1000.0, 0.0}, 0);
  CHECK(lg.loss == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(all_finite(lg.dlogits));
}

TEST_CASE("softmax loss: gradient matches finite differences") {
  DetRng rng(17);
  Vector logits(5);
  for (auto& e : logits) e = rng.next_uniform(-2.0, 2.0);
  const std::size_t label = 3;
  const LossGrad lg = softmax_ce_loss(logits, label);
  const double h = 1e-6;
  for (std::size_t i = 0; i < 5; ++i) {
    Vector up = logits, down = logits;
    up[i] += h;
    down[i] -= h;
    const double numeric =
        (softmax_ce_loss(up, label).loss - softmax_ce_loss(down, label).loss) / (2.0 * h);
    CHECK(std::abs(lg.dlogits[i] - numeric) < 1e-7);
  }
}

TEST_CASE("softmax curvature: closed form at uniform logits") {
  const Matrix h2 = softmax_second_derivative({0.0, 0.0});
  CHECK(std::abs(h2(0, 0) - 0.25) < 1e-15);
  CHECK(std::abs(h2(0, 1) + 0.25) < 1e-15);
  CHECK(std::abs(h2(1, 0) + 0.25) < 1e-15);
  CHECK(std::abs(h2(1, 1) - 0.25) < 1e-15);

  const Matrix h3 = softmax_second_derivative({0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(h3(i, j) == doctest::Approx(i == j ? 2.0 / 9.0 : -1.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("softmax curvature: matches numerical differentiation of the gradient") {
  CHECK(softmax_curvature_max_err(41, 4) < 1e-6);
}

TEST_CASE("softmax curvature: symmetric with zero row sums") {
  DetRng rng(19);
  Vector logits(6);
  for (auto& e : logits) e = rng.next_uniform(-3.0, 3.0);
  const Matrix h = softmax_second_derivative(logits);
  for (std::size_t i = 0; i < 6; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(std::abs(h(i, j) - h(j, i)) < 1e-15);
      row += h(i, j);
    }
    CHECK(std::abs(row) < 1e-12);
    CHECK(h(i, i) >= 0.0);
    CHECK(h(i, i) <= 0.25);
  }
}

TEST_CASE("logit_backprop: output layer delta is the selected basis vector") {
  Network net = init_network(small_spec({3, 3}, 1, Activation::relu, 0.0));
  net.weights[0] = Matrix::identity(3);
  const auto [logits, cache] = forward(net, {0.1, 0.2, 0.3}, 1);
  const auto deltas = logit_backprop(net, cache, 1);
  CHECK(deltas.back() == Vector{0.0, 1.0, 0.0});
}

TEST_CASE("logit_backprop: linear in the upstream seed") {
  const Network net = init_network(small_spec({6, 5, 4}, 23));
  const auto [logits, cache] = forward(net, random_input(3, 6), 2);
  const auto deltas = logit_backprop(net, cache, 2);
  Vector doubled(4, 0.0);
  doubled[2] = 2.0;
  const LayerGrads scaled = backward(net, cache, doubled);
  for (std::size_t l = 0; l < deltas.size(); ++l)
    for (std::size_t i = 0; i < deltas[l].size(); ++i)
      CHECK(2.0 * deltas[l][i] == doctest::Approx(scaled.deltas[l][i]).epsilon(1e-15));
}

TEST_CASE("logit_backprop: matches finite differences through the bias") {
  // Perturbing a bias entry perturbs exactly one pre-activation, so the
  // numeric derivative of the logit against it is the delta entry.
  Network net = init_network(small_spec({7, 6, 3}, 29));
  const Vector x = random_input(31, 7);
  const int task = 2;
  const std::size_t cls = 1;
  const auto deltas = logit_backprop(net, forward(net, x, task).second, cls);

  const double h = 1e-6;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
      double& b = net.biases[l][i];
      const double saved = b;
      b = saved + h;
      const double up = forward(net, x, task).first[cls];
      b = saved - h;
      const double down = forward(net, x, task).first[cls];
      b = saved;
      const double numeric = (up - down) / (2.0 * h);
      CHECK(std::abs(deltas[l][i] - numeric) < 1e-6);
    }
  }
}

TEST_CASE("encoding round trips exactly on any vector") {
  DetRng rng(37);
  const Permutation p = fel_permutation(1, 6, 40);
  Vector v(40);
  for (auto& e : v) e = rng.next_uniform(-5.0, 5.0);
  CHECK(apply_inverse_permutation(apply_permutation(v, p), p) == v);
}

TEST_CASE("forward and backward are adjoint on a linear net") {
  const Network net = init_network(small_spec({6, 5, 4}, 7, Activation::identity));
  DetRng rng(43);
  const Vector x = random_input(47, 6);
  Vector v(6), u(4);
  for (auto& e : v) e = rng.next_uniform(-1.0, 1.0);
  for (auto& e : u) e = rng.next_uniform(-1.0, 1.0);
  const int task = 3;

  const double h = 1e-6;
  Vector xh = x;
  for (std::size_t i = 0; i < 6; ++i) xh[i] += h * v[i];
  const Vector fx = forward(net, x, task).first;
  const Vector fxh = forward(net, xh, task).first;
  double u_jv = 0.0;
  for (std::size_t i = 0; i < 4; ++i) u_jv += u[i] * (fxh[i] - fx[i]) / h;

  const LayerGrads grads = backward(net, forward(net, x, task).second, u);
  const double jtu_v = dot(mat_tvec(net.weights[0], grads.deltas[0]), v);
  CHECK(std::abs(u_jv - jtu_v) < 1e-9);
}
