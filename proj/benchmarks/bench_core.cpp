#include <benchmark/benchmark.h>

#include "rgo/network.hpp"
#include "rgo/optimizer.hpp"

using namespace rgo;

namespace {

Vector gaussian_vector(DetRng& rng, std::size_t n) {
  Vector v(n);
  for (auto& e : v) e = rng.next_gaussian();
  return v;
}

Matrix warm_projector(std::size_t dim) {
  DetRng rng(1);
  Matrix p = Matrix::identity(dim);
  for (std::size_t i = 0; i < 2 * dim; ++i) p = rls_update(p, gaussian_vector(rng, dim), 1.0);
  return p;
}

void BM_RlsUpdate(benchmark::State& state) {
  const std::size_t dim = static_cast<std::size_t>(state.range(0));
  Matrix p = warm_projector(dim);
  DetRng rng(2);
  const Vector g = gaussian_vector(rng, dim);
  for (auto _ : state) {
    p = rls_update(p, g, 1.0);
    benchmark::DoNotOptimize(p.data().data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()));
}
BENCHMARK(BM_RlsUpdate)->Arg(16)->Arg(64)->Arg(256);

// The point of forming (P delta) x^T instead of P (delta x^T): out_dim^2
// work instead of out_dim^2 * in_dim.
void BM_ProjectGradLeftToRight(benchmark::State& state) {
  const std::size_t out = static_cast<std::size_t>(state.range(0));
  const std::size_t in = 4 * out;
  const Matrix p = warm_projector(out);
  DetRng rng(3);
  const Vector delta = gaussian_vector(rng, out);
  const Vector input = gaussian_vector(rng, in);
  for (auto _ : state) {
    const Matrix modified = outer(mat_vec(p, delta), input);
    benchmark::DoNotOptimize(modified.data().data());
  }
}
BENCHMARK(BM_ProjectGradLeftToRight)->Arg(16)->Arg(64)->Arg(256);

void BM_ProjectGradMatrixProduct(benchmark::State& state) {
  const std::size_t out = static_cast<std::size_t>(state.range(0));
  const std::size_t in = 4 * out;
  const Matrix p = warm_projector(out);
  DetRng rng(3);
  const Vector delta = gaussian_vector(rng, out);
  const Vector input = gaussian_vector(rng, in);
  const Matrix grad = outer(delta, input);
  for (auto _ : state) {
    const Matrix modified = matmul(p, grad);
    benchmark::DoNotOptimize(modified.data().data());
  }
}
BENCHMARK(BM_ProjectGradMatrixProduct)->Arg(16)->Arg(64)->Arg(256);

void BM_ForwardBackward(benchmark::State& state) {
  const std::size_t width = static_cast<std::size_t>(state.range(0));
  NetworkSpec spec;
  spec.layer_widths = {width, width, 10};
  spec.init_seed = 4;
  const Network net = init_network(spec);
  DetRng rng(5);
  const Vector x = gaussian_vector(rng, width);
  for (auto _ : state) {
    auto [logits, cache] = forward(net, x, 3);
    const LayerGrads grads = backward(net, cache, softmax_ce_loss(logits, 1).dlogits);
    benchmark::DoNotOptimize(grads.deltas.data());
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(64)->Arg(256);

void BM_PowerIteration(benchmark::State& state) {
  const std::size_t dim = static_cast<std::size_t>(state.range(0));
  DetRng rng(6);
  Matrix b(dim, dim);
  for (auto& e : b.data()) e = rng.next_uniform(-1.0, 1.0);
  Matrix a = matmul(b, transpose(b));
  for (std::size_t i = 0; i < dim; ++i) a(i, i) += 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(max_eigenvalue(a));
  }
}
BENCHMARK(BM_PowerIteration)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
