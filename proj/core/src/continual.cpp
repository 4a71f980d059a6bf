#include "rgo/continual.hpp"

#include <chrono>
#include <stdexcept>
#include <tuple>

namespace rgo {

namespace {

// Cyclic mini-batch source: a fresh deterministic shuffle of the sample
// indices at the start of every epoch, consumed batch_size at a time.
class BatchCursor {
 public:
  BatchCursor(std::size_t n, std::uint64_t seed) : n_(n), rng_(seed) { reshuffle(); }

  std::size_t next_index() {
    if (pos_ == n_) reshuffle();
    return order_[pos_++];
  }

 private:
  void reshuffle() {
    order_ = rng_permutation(rng_, n_);
    pos_ = 0;
  }

  std::size_t n_;
  DetRng rng_;
  Permutation order_;
  std::size_t pos_ = 0;
};

std::uint64_t task_shuffle_seed(std::uint64_t init_seed, int task_id) {
  return init_seed ^ (static_cast<std::uint64_t>(task_id) * 0x9E3779B97F4A7C15ULL);
}

LayerGrads zero_grads_like(const Network& net) {
  LayerGrads g;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    g.weight_grads.emplace_back(net.weights[l].rows(), net.weights[l].cols());
    g.bias_grads.emplace_back(net.biases[l].size(), 0.0);
    g.deltas.emplace_back(net.biases[l].size(), 0.0);
    g.inputs.emplace_back();
  }
  return g;
}

void accumulate(LayerGrads& acc, const LayerGrads& g) {
  for (std::size_t l = 0; l < acc.num_layers(); ++l) {
    for (std::size_t i = 0; i < acc.weight_grads[l].data().size(); ++i)
      acc.weight_grads[l].data()[i] += g.weight_grads[l].data()[i];
    for (std::size_t i = 0; i < acc.bias_grads[l].size(); ++i) {
      acc.bias_grads[l][i] += g.bias_grads[l][i];
      acc.deltas[l][i] += g.deltas[l][i];
    }
  }
}

void divide(LayerGrads& acc, double n) {
  for (std::size_t l = 0; l < acc.num_layers(); ++l) {
    for (auto& e : acc.weight_grads[l].data()) e /= n;
    for (auto& e : acc.bias_grads[l]) e /= n;
    for (auto& e : acc.deltas[l]) e /= n;
  }
}

// steps_per_task averaged mini-batch steps on one task. `state` is null for
// the plain-sgd arms.
void train_one_task(Network& net, const ProjectionState* state, const Task& task,
                    const TrainConfig& config) {
  if (task.train.empty()) throw std::invalid_argument("train_one_task: empty train split");
  BatchCursor cursor(task.train.size(), task_shuffle_seed(net.spec.init_seed, task.id));
  for (std::size_t step = 0; step < config.steps_per_task; ++step) {
    LayerGrads batch = zero_grads_like(net);
    for (std::size_t b = 0; b < config.batch_size; ++b) {
      const Sample& sample = task.train[cursor.next_index()];
      auto [logits, cache] = forward(net, sample.x, task.id);
      const LossGrad lg = softmax_ce_loss(logits, static_cast<std::size_t>(sample.label));
      LayerGrads grads = backward(net, cache, lg.dlogits);
      if (state != nullptr) grads = modify_grads(*state, grads);
      accumulate(batch, grads);
    }
    divide(batch, static_cast<double>(config.batch_size));
    sgd_step(net, batch, config.learning_rate);
  }
}

}  // namespace

std::string to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::rgo: return "rgo";
    case OptimizerKind::sgd: return "sgd";
    case OptimizerKind::stl: return "stl";
  }
  throw std::logic_error("to_string: unknown optimizer kind");
}

OptimizerKind optimizer_kind_from_string(const std::string& name) {
  if (name == "rgo") return OptimizerKind::rgo;
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "stl") return OptimizerKind::stl;
  throw std::invalid_argument("unknown optimizer arm: " + name);
}

void AccuracyMatrix::validate() const {
  if (rows.empty()) throw std::invalid_argument("AccuracyMatrix: empty");
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (rows[t].size() != t + 1)
      throw std::invalid_argument("AccuracyMatrix: row " + std::to_string(t) +
                                  " is incomplete");
    for (double v : rows[t])
      if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("AccuracyMatrix: accuracy outside [0,1]");
  }
}

std::pair<double, double> acc_bwt(const AccuracyMatrix& r) {
  r.validate();
  const std::size_t t = r.num_tasks();
  const auto& last = r.rows[t - 1];
  double acc = 0.0;
  for (double v : last) acc += v;
  acc /= static_cast<double>(t);

  double bwt = 0.0;
  if (t >= 2) {
    for (std::size_t k = 0; k < t; ++k) bwt += last[k] - r.rows[k][k];
    bwt /= static_cast<double>(t - 1);
  }
  return {acc, bwt};
}

double evaluate(const Network& net, std::span<const Sample> data, int task) {
  if (data.empty()) throw std::invalid_argument("evaluate: empty data");
  std::size_t correct = 0;
  for (const Sample& sample : data) {
    const Vector logits = forward(net, sample.x, task).first;
    std::size_t best = 0;
    for (std::size_t c = 1; c < logits.size(); ++c)
      if (logits[c] > logits[best]) best = c;
    if (best == static_cast<std::size_t>(sample.label)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

RunReport run_continual(const NetworkSpec& spec, const TaskStream& stream, OptimizerKind optimizer,
                        const TrainConfig& config, Network* trained_out, double alpha) {
  if (optimizer != OptimizerKind::rgo && optimizer != OptimizerKind::sgd)
    throw std::invalid_argument("run_continual: optimizer must be rgo or sgd");
  if (spec.output_width() != stream.n_classes)
    throw std::invalid_argument("run_continual: network output width != stream class count");
  if (stream.tasks.empty()) throw std::invalid_argument("run_continual: empty stream");

  const auto start = std::chrono::steady_clock::now();

  Network net = init_network(spec);
  ProjectionState state = init_projections(net, alpha);
  const bool project = optimizer == OptimizerKind::rgo;

  RunReport report;
  report.optimizer = optimizer;
  report.net_spec = spec;
  report.train_config = config;

  for (std::size_t t = 0; t < stream.tasks.size(); ++t) {
    const Task& task = stream.tasks[t];
    train_one_task(net, project ? &state : nullptr, task, config);
    if (project) consolidate_task(state, net, task.train, task.id);

    std::vector<double> row;
    for (std::size_t k = 0; k <= t; ++k)
      row.push_back(evaluate(net, stream.tasks[k].test, stream.tasks[k].id));
    report.acc_matrix.rows.push_back(std::move(row));
  }

  std::tie(report.acc, report.bwt) = acc_bwt(report.acc_matrix);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (trained_out != nullptr) *trained_out = std::move(net);
  return report;
}

RunReport run_stl(const NetworkSpec& spec, const TaskStream& stream, const TrainConfig& config) {
  if (spec.output_width() != stream.n_classes)
    throw std::invalid_argument("run_stl: network output width != stream class count");
  if (stream.tasks.empty()) throw std::invalid_argument("run_stl: empty stream");

  const auto start = std::chrono::steady_clock::now();

  RunReport report;
  report.optimizer = OptimizerKind::stl;
  report.net_spec = spec;
  report.train_config = config;

  std::vector<double> own_scores;
  for (const Task& task : stream.tasks) {
    // xor with the 0-based position: distinct nets per task, and a 1-task
    // stream reproduces the continual run exactly.
    NetworkSpec per_task = spec;
    per_task.init_seed = spec.init_seed ^ static_cast<std::uint64_t>(task.id - 1);
    Network net = init_network(per_task);
    train_one_task(net, nullptr, task, config);
    own_scores.push_back(evaluate(net, task.test, task.id));

    std::vector<double> row(own_scores.begin(), own_scores.end());
    report.acc_matrix.rows.push_back(std::move(row));
  }

  std::tie(report.acc, report.bwt) = acc_bwt(report.acc_matrix);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace rgo
