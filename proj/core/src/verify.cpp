#include "rgo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "rgo/continual.hpp"
#include "rgo/csv.hpp"
#include "rgo/optimizer.hpp"

namespace rgo {

namespace {

Matrix random_spd(DetRng& rng, std::size_t n, double ridge = 1.0) {
  Matrix b(n, n);
  for (auto& e : b.data()) e = rng.next_uniform(-1.0, 1.0);
  Matrix a = matmul(b, transpose(b));
  for (std::size_t i = 0; i < n; ++i) a(i, i) += ridge;
  return a;
}

Vector random_vector(DetRng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  Vector v(n);
  for (auto& e : v) e = rng.next_uniform(lo, hi);
  return v;
}

Matrix projector_from_updates(DetRng& rng, std::size_t dim, std::size_t n_updates,
                              double alpha = 1.0) {
  Matrix p = Matrix::identity(dim);
  for (std::size_t i = 0; i < n_updates; ++i) {
    Vector g(dim);
    for (auto& e : g) e = rng.next_gaussian();
    p = rls_update(p, g, alpha);
  }
  return p;
}

}  // namespace

double sherman_morrison_max_err(std::uint64_t seed, std::size_t dim, std::size_t n_grads,
                                double alpha) {
  DetRng rng(seed);
  Matrix p = Matrix::identity(dim);
  Matrix accum = Matrix::identity(dim);  // I + (1/alpha) sum(g gT)
  for (std::size_t i = 0; i < n_grads; ++i) {
    const Vector g = random_vector(rng, dim);
    p = rls_update(p, g, alpha);
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c) accum(r, c) += g[r] * g[c] / alpha;
  }
  return max_abs_diff(p, invert(accum));
}

double gradient_check_max_rel_err(const NetworkSpec& spec, int task, std::uint64_t seed,
                                  std::size_t per_layer) {
  Network net = init_network(spec);
  DetRng rng(seed);
  const Vector x = random_vector(rng, spec.input_width());
  const std::size_t label = rng.next() % spec.output_width();

  auto loss_at = [&]() {
    const Vector logits = forward(net, x, task).first;
    return softmax_ce_loss(logits, label).loss;
  };

  auto [logits, cache] = forward(net, x, task);
  const LossGrad lg = softmax_ce_loss(logits, label);
  const LayerGrads grads = backward(net, cache, lg.dlogits);

  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const std::size_t n_weights = net.weights[l].data().size();
    for (std::size_t s = 0; s < per_layer; ++s) {
      const std::size_t idx = rng.next() % n_weights;
      double& w = net.weights[l].data()[idx];
      const double saved = w;
      w = saved + h;
      const double up = loss_at();
      w = saved - h;
      const double down = loss_at();
      w = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = grads.weight_grads[l].data()[idx];
      const double rel = std::abs(analytic - numeric) /
                         std::max({1.0, std::abs(analytic), std::abs(numeric)});
      worst = std::max(worst, rel);
    }
    for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
      double& b = net.biases[l][i];
      const double saved = b;
      b = saved + h;
      const double up = loss_at();
      b = saved - h;
      const double down = loss_at();
      b = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = grads.bias_grads[l][i];
      const double rel = std::abs(analytic - numeric) /
                         std::max({1.0, std::abs(analytic), std::abs(numeric)});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

double softmax_curvature_max_err(std::uint64_t seed, std::size_t n_logits) {
  DetRng rng(seed);
  Vector logits = random_vector(rng, n_logits, -2.0, 2.0);
  const std::size_t label = rng.next() % n_logits;
  const Matrix analytic = softmax_second_derivative(logits);

  // d(dlogits_i)/d(logit_j); the one-hot part of dlogits is constant, so
  // this differentiates the softmax itself.
  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t j = 0; j < n_logits; ++j) {
    Vector up = logits, down = logits;
    up[j] += h;
    down[j] -= h;
    const Vector gu = softmax_ce_loss(up, label).dlogits;
    const Vector gd = softmax_ce_loss(down, label).dlogits;
    for (std::size_t i = 0; i < n_logits; ++i) {
      const double numeric = (gu[i] - gd[i]) / (2.0 * h);
      worst = std::max(worst, std::abs(analytic(i, j) - numeric));
    }
  }
  return worst;
}

TraceMcResult trace_normalization_mc(std::uint64_t seed, std::size_t dim, std::size_t n_draws) {
  DetRng rng(seed);
  const Matrix p = projector_from_updates(rng, dim, 5 * dim);
  const double s = static_cast<double>(dim) / trace(p);
  const Matrix p_hat = scale(p, s);

  TraceMcResult out;
  out.trace_error = std::abs(trace(p_hat) - static_cast<double>(dim));
  double num = 0.0, den = 0.0;
  Vector g(dim);
  for (std::size_t i = 0; i < n_draws; ++i) {
    for (auto& e : g) e = rng.next_gaussian();
    num += dot(g, mat_vec(p_hat, g));
    den += dot(g, g);
  }
  out.ratio = num / den;
  return out;
}

QuadraticBoundTrial quadratic_bound_trial(std::uint64_t seed) {
  DetRng rng(seed);
  const std::size_t dim = 2 + rng.next() % 7;             // 2..8
  const std::size_t n_steps = 20 + rng.next() % 81;       // 20..100
  const double eta = 0.02 + 0.08 * rng.next_unit();       // [0.02, 0.1)

  const Matrix h_old = random_spd(rng, dim, 0.3);
  Matrix h_new = random_spd(rng, dim, 0.3);
  const Vector anchor = random_vector(rng, dim);  // optimum of the old task
  Vector target = random_vector(rng, dim);        // optimum of the new task
  for (std::size_t i = 0; i < dim; ++i) target[i] = anchor[i] + 2.0 * target[i];

  // Closed-form normalized inverse-curvature projector for the single
  // accumulated curvature matrix.
  const Matrix h_inv = invert(h_old);
  const Matrix p = scale(h_inv, static_cast<double>(dim) / trace(h_inv));

  // Keep the projected descent contractive; the bound presumes steps small
  // enough that first-order loss decrease dominates.
  const double step_gain = eta * max_eigenvalue(symmetrize(matmul(p, h_new)));
  if (step_gain > 0.5) h_new = scale(h_new, 0.5 / step_gain);

  auto new_loss = [&](const Vector& theta) {
    Vector d(dim);
    for (std::size_t i = 0; i < dim; ++i) d[i] = theta[i] - target[i];
    return 0.5 * dot(d, mat_vec(h_new, d));
  };

  QuadraticBoundTrial trial;
  trial.bound = past_loss_bound(n_steps, eta, p, h_old, new_loss(anchor));

  Vector theta = anchor;
  for (std::size_t step = 0; step < n_steps; ++step) {
    Vector d(dim);
    for (std::size_t i = 0; i < dim; ++i) d[i] = theta[i] - target[i];
    const Vector grad = mat_vec(h_new, d);
    const Vector update = mat_vec(p, grad);
    for (std::size_t i = 0; i < dim; ++i) theta[i] -= eta * update[i];
  }
  trial.realized = past_loss_estimate(theta, anchor, h_old);
  return trial;
}

double first_task_equivalence_max_err(std::uint64_t seed) {
  const TaskStream stream = gen_synth_gaussian_tasks(1, 16, 4, 80, 40, seed ^ 0xABCDEF);
  NetworkSpec spec;
  spec.layer_widths = {16, 12, 4};
  spec.init_seed = seed;
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.steps_per_task = 40;
  cfg.batch_size = 10;
  cfg.eta_max = 0.1;

  Network projected, plain;
  run_continual(spec, stream, OptimizerKind::rgo, cfg, &projected);
  run_continual(spec, stream, OptimizerKind::sgd, cfg, &plain);
  return max_abs_diff(flatten_parameters(projected), flatten_parameters(plain));
}

namespace {

struct Check {
  std::string name;
  std::function<std::optional<std::string>()> fn;  // nullopt = pass
};

// Shared desk-scale fixture for the harness-level checks: one permuted
// synthetic stream, the projected arm run twice (determinism) with the
// trained network captured.
struct DeskFixture {
  TaskStream stream;
  RunReport report_a;
  RunReport report_b;
  Network net;
};

const DeskFixture& desk_fixture() {
  static const DeskFixture fixture = [] {
    DeskFixture f;
    const Dataset base = make_synth_base(64, 10, 400, 200, 2024);
    f.stream = gen_permuted_tasks(base, 5, 77);
    NetworkSpec spec;
    spec.layer_widths = {64, 64, 10};
    spec.init_seed = 11;
    TrainConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.steps_per_task = 200;
    cfg.batch_size = 10;
    cfg.eta_max = 0.1;
    f.report_a = run_continual(spec, f.stream, OptimizerKind::rgo, cfg, &f.net);
    f.report_b = run_continual(spec, f.stream, OptimizerKind::rgo, cfg);
    return f;
  }();
  return fixture;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::vector<Check> build_checks(const VerifyOptions& options) {
  std::vector<Check> checks;
  auto expect = [](bool ok, const std::string& detail) -> std::optional<std::string> {
    if (ok) return std::nullopt;
    return detail;
  };

  // ---- dense core ----

  checks.push_back({"invert-involution", [expect] {
    DetRng rng(101);
    double worst = 0.0;
    for (std::size_t dim : {3u, 5u, 8u}) {
      const Matrix a = random_spd(rng, dim);
      worst = std::max(worst, max_abs_diff(invert(invert(a)), a));
    }
    return expect(worst < 1e-8, "max deviation " + fmt(worst));
  }});

  checks.push_back({"invert-residual", [expect] {
    DetRng rng(102);
    const Matrix a = random_spd(rng, 6);
    const Matrix prod = matmul(a, invert(a));
    const double worst = max_abs_diff(prod, Matrix::identity(6));
    return expect(worst < 1e-9, "residual " + fmt(worst));
  }});

  checks.push_back({"permutation-bijection", [expect] {
    DetRng rng(103);
    for (std::size_t n : {1u, 2u, 7u, 64u, 500u}) {
      Permutation p = rng_permutation(rng, n);
      std::sort(p.begin(), p.end());
      for (std::size_t i = 0; i < n; ++i)
        if (p[i] != i) return expect(false, "not a bijection at n=" + std::to_string(n));
    }
    return expect(true, "");
  }});

  checks.push_back({"rayleigh-bound", [expect] {
    DetRng rng(104);
    const Matrix a = random_spd(rng, 6);
    const double lambda = max_eigenvalue(a, 20000, 1e-15);
    for (int i = 0; i < 100; ++i) {
      Vector x = random_vector(rng, 6);
      const double q = dot(x, mat_vec(a, x)) / dot(x, x);
      if (lambda < q - 1e-8)
        return expect(false, "eigenvalue " + fmt(lambda) + " below quotient " + fmt(q));
    }
    return expect(true, "");
  }});

  checks.push_back({"matvec-linearity", [expect] {
    DetRng rng(105);
    Matrix a(7, 5);
    for (auto& e : a.data()) e = rng.next_uniform(-2.0, 2.0);
    const Vector x = random_vector(rng, 5), y = random_vector(rng, 5);
    Vector xy(5);
    for (std::size_t i = 0; i < 5; ++i) xy[i] = x[i] + y[i];
    const Vector lhs = mat_vec(a, xy);
    Vector rhs = mat_vec(a, x);
    const Vector ay = mat_vec(a, y);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += ay[i];
    const double worst = max_abs_diff(lhs, rhs);
    return expect(worst < 1e-12, "max deviation " + fmt(worst));
  }});

  // ---- network ----

  checks.push_back({"fel-round-trip", [expect] {
    DetRng rng(106);
    for (int task : {1, 2, 9}) {
      const Permutation perm = fel_permutation(0, task, 33);
      const Vector v = random_vector(rng, 33);
      if (apply_inverse_permutation(apply_permutation(v, perm), perm) != v)
        return expect(false, "round trip not identity for task " + std::to_string(task));
    }
    return expect(true, "");
  }});

  checks.push_back({"fel-determinism", [expect] {
    if (fel_permutation(2, 5, 64) != fel_permutation(2, 5, 64))
      return expect(false, "same key produced different permutations");
    if (fel_permutation(0, 1, 64) == fel_permutation(0, 2, 64))
      return expect(false, "distinct tasks produced the same permutation");
    return expect(true, "");
  }});

  checks.push_back({"fel-gradient-consistency", [expect] {
    NetworkSpec spec;
    spec.layer_widths = {16, 12, 8, 4};
    spec.init_seed = 42;
    const double worst = gradient_check_max_rel_err(spec, 3, 421, 20);
    return expect(worst < 1e-6, "max relative deviation " + fmt(worst));
  }});

  checks.push_back({"forward-backward-adjointness", [expect] {
    NetworkSpec spec;
    spec.layer_widths = {6, 5, 4};
    spec.hidden_activation = Activation::identity;
    spec.init_seed = 7;
    const Network net = init_network(spec);
    DetRng rng(107);
    const Vector x = random_vector(rng, 6);
    const Vector v = random_vector(rng, 6);
    const Vector u = random_vector(rng, 4);
    const int task = 2;

    const double h = 1e-6;
    Vector xh = x;
    for (std::size_t i = 0; i < x.size(); ++i) xh[i] += h * v[i];
    const Vector fx = forward(net, x, task).first;
    const Vector fxh = forward(net, xh, task).first;
    double u_jv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) u_jv += u[i] * (fxh[i] - fx[i]) / h;

    const auto cache = forward(net, x, task).second;
    const LayerGrads grads = backward(net, cache, u);
    const Vector jtu = mat_tvec(net.weights[0], grads.deltas[0]);
    const double jtu_v = dot(jtu, v);
    const double dev = std::abs(u_jv - jtu_v);
    return expect(dev < 1e-9, "adjoint deviation " + fmt(dev));
  }});

  checks.push_back({"softmax-curvature-structure", [expect] {
    DetRng rng(108);
    const Vector logits = random_vector(rng, 5, -3.0, 3.0);
    const Matrix h = softmax_second_derivative(logits);
    for (std::size_t i = 0; i < 5; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < 5; ++j) {
        row += h(i, j);
        if (std::abs(h(i, j) - h(j, i)) > 1e-12) return expect(false, "not symmetric");
      }
      if (std::abs(row) > 1e-12) return expect(false, "row sum " + fmt(row));
      if (h(i, i) < 0.0 || h(i, i) > 0.25)
        return expect(false, "diagonal outside [0, 0.25]: " + fmt(h(i, i)));
    }
    return expect(true, "");
  }});

  checks.push_back({"softmax-curvature-matches-fd", [expect] {
    double worst = 0.0;
    for (std::uint64_t seed : {1u, 2u, 3u})
      for (std::size_t c : {2u, 3u, 5u})
        worst = std::max(worst, softmax_curvature_max_err(seed, c));
    return expect(worst < 1e-6, "max deviation " + fmt(worst));
  }});

  checks.push_back({"weight-grad-reconstruction", [expect] {
    NetworkSpec spec;
    spec.layer_widths = {9, 7, 5};
    spec.init_seed = 5;
    const Network net = init_network(spec);
    DetRng rng(109);
    const Vector x = random_vector(rng, 9);
    auto [logits, cache] = forward(net, x, 4);
    const LayerGrads grads = backward(net, cache, softmax_ce_loss(logits, 1).dlogits);
    for (std::size_t l = 0; l < grads.num_layers(); ++l) {
      if (!(grads.weight_grads[l] == outer(grads.deltas[l], grads.inputs[l])))
        return expect(false, "layer " + std::to_string(l) + " differs bitwise");
      if (grads.bias_grads[l] != grads.deltas[l])
        return expect(false, "bias grad != delta at layer " + std::to_string(l));
    }
    return expect(true, "");
  }});

  // ---- optimizer ----

  checks.push_back({"rls-batch-inverse", [expect] {
    double worst = 0.0;
    for (std::size_t dim : {2u, 4u, 8u})
      for (std::uint64_t seed : {10u, 20u, 30u})
        worst = std::max(worst, sherman_morrison_max_err(seed, dim, 50));
    worst = std::max(worst, sherman_morrison_max_err(40, 6, 50, 2.5));
    return expect(worst < 1e-7, "max deviation " + fmt(worst));
  }});

  checks.push_back({"projection-symmetry", [expect, options] {
    DetRng rng(110);
    Matrix p = Matrix::identity(16);
    for (int i = 0; i < 1000; ++i) {
      Vector g(16);
      for (auto& e : g) e = rng.next_gaussian();
      p = rls_update(p, g, 1.0);
      if (i == 500 && options.inject_fault == "projection-symmetry") p(0, 1) += 1e-3;
    }
    const double worst = max_abs_diff(p, transpose(p));
    return expect(worst < 1e-9, "asymmetry " + fmt(worst));
  }});

  checks.push_back({"effective-trace-normalization", [expect] {
    DetRng rng(111);
    for (int rep = 0; rep < 5; ++rep) {
      const Matrix p = projector_from_updates(rng, 12, 30);
      const Matrix p_hat = scale(p, 12.0 / trace(p));
      const double err = std::abs(trace(p_hat) - 12.0);
      if (err >= 1e-9) return expect(false, "trace error " + fmt(err));
    }
    return expect(true, "");
  }});

  checks.push_back({"convergence-rate-consistency-mc", [expect] {
    const TraceMcResult mc = trace_normalization_mc(2026, 8, 100000);
    if (mc.trace_error >= 1e-9)
      return expect(false, "trace error " + fmt(mc.trace_error));
    return expect(mc.ratio > 0.98 && mc.ratio < 1.02, "ratio " + fmt(mc.ratio));
  }});

  checks.push_back({"monotone-contraction", [expect] {
    DetRng rng(112);
    Matrix p = Matrix::identity(10);
    for (int i = 0; i < 50; ++i) {
      Vector g(10);
      for (auto& e : g) e = rng.next_gaussian();
      const double before = dot(g, mat_vec(p, g));
      p = rls_update(p, g, 1.0);
      const double after = dot(g, mat_vec(p, g));
      if (after > before + 1e-12)
        return expect(false, "quadratic form grew: " + fmt(before) + " -> " + fmt(after));
    }
    return expect(true, "");
  }});

  checks.push_back({"left-to-right-identity", [expect] {
    DetRng rng(113);
    const Matrix p = projector_from_updates(rng, 6, 12);
    const Vector delta = random_vector(rng, 6);
    const Vector x = random_vector(rng, 4);
    const Matrix lhs = outer(mat_vec(p, delta), x);
    const Matrix rhs = matmul(p, outer(delta, x));
    const double worst = max_abs_diff(lhs, rhs);
    return expect(worst < 1e-12, "max deviation " + fmt(worst));
  }});

  checks.push_back({"first-task-equivalence", [expect] {
    const double worst = first_task_equivalence_max_err(99);
    return expect(worst < 1e-12, "max parameter deviation " + fmt(worst));
  }});

  checks.push_back({"quadratic-descent-bound", [expect] {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const QuadraticBoundTrial trial = quadratic_bound_trial(seed);
      if (trial.realized > trial.bound + 1e-9)
        return expect(false, "seed " + std::to_string(seed) + ": realized " +
                                 fmt(trial.realized) + " exceeds bound " + fmt(trial.bound));
    }
    return expect(true, "");
  }});

  checks.push_back({"curvature-materialization", [expect] {
    DetRng rng(114);
    NetworkSpec spec;
    spec.layer_widths = {5, 5, 3};
    spec.init_seed = 3;
    const Network net = init_network(spec);
    ProjectionState state = init_projections(net);
    Matrix expected = Matrix::identity(5);  // alpha = 1
    for (int i = 0; i < 20; ++i) {
      Vector g = random_vector(rng, 5);
      state.projections[0] = rls_update(state.projections[0], g, state.alpha);
      for (std::size_t r = 0; r < 5; ++r)
        for (std::size_t c = 0; c < 5; ++c) expected(r, c) += g[r] * g[c];
    }
    const double worst = max_abs_diff(accumulated_curvature(state, 0), expected);
    return expect(worst < 1e-6, "max deviation " + fmt(worst));
  }});

  // ---- continual harness ----

  checks.push_back({"run-determinism", [expect] {
    const DeskFixture& f = desk_fixture();
    if (!(f.report_a.acc_matrix == f.report_b.acc_matrix))
      return expect(false, "accuracy matrices differ between identical runs");
    return expect(f.report_a.acc == f.report_b.acc && f.report_a.bwt == f.report_b.bwt,
                  "metrics differ between identical runs");
  }});

  checks.push_back({"diagonal-sanity", [expect] {
    const DeskFixture& f = desk_fixture();
    const double chance = 1.0 / static_cast<double>(f.stream.n_classes);
    for (std::size_t k = 0; k < f.report_a.acc_matrix.num_tasks(); ++k) {
      const double own = f.report_a.acc_matrix.rows[k][k];
      if (own < chance)
        return expect(false, "task " + std::to_string(k + 1) + " trained below chance: " + fmt(own));
    }
    return expect(true, "");
  }});

  checks.push_back({"fel-argmax-decoupling", [expect] {
    const DeskFixture& f = desk_fixture();
    const double chance = 1.0 / static_cast<double>(f.stream.n_classes);
    const double cross = evaluate(f.net, f.stream.tasks[0].test, f.stream.tasks[2].id);
    return expect(std::abs(cross - chance) <= 0.10,
                  "cross-task accuracy " + fmt(cross) + " vs chance " + fmt(chance));
  }});

  checks.push_back({"metric-recomputability", [expect] {
    const DeskFixture& f = desk_fixture();
    const auto [acc, bwt] = acc_bwt(f.report_a.acc_matrix);
    return expect(acc == f.report_a.acc && bwt == f.report_a.bwt,
                  "recomputed metrics differ from report");
  }});

  // ---- reporting ----

  checks.push_back({"csv-round-trip", [expect] {
    AccuracyMatrix m;
    m.rows = {{1.0 / 3.0}, {0.1234567890123456789, 0.5}, {0.0, 1.0, 0.7071067811865476}};
    const AccuracyMatrix back = acc_matrix_from_csv(acc_matrix_to_csv(m));
    return expect(back == m, "matrix changed across write/read");
  }});

  return checks;
}

}  // namespace

int run_verify_suite(const VerifyOptions& options, std::ostream& out) {
  const std::vector<Check> checks = build_checks(options);
  int failures = 0;
  std::string first_failure;
  for (const Check& check : checks) {
    std::optional<std::string> detail;
    try {
      detail = check.fn();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (detail) {
      ++failures;
      if (first_failure.empty()) first_failure = check.name;
      out << "FAIL " << check.name << ": " << *detail << "\n";
    } else {
      out << "PASS " << check.name << "\n";
    }
  }
  out << (failures == 0 ? "verify: all " : "verify: FAILED, first failing property: ");
  if (failures == 0)
    out << checks.size() << " properties hold\n";
  else
    out << first_failure << " (" << failures << " of " << checks.size() << " failed)\n";
  return failures;
}

}  // namespace rgo
