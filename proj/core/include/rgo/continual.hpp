#pragma once

#include <span>
#include <string>

#include "rgo/optimizer.hpp"
#include "rgo/taskstream.hpp"

namespace rgo {

enum class OptimizerKind { rgo, sgd, stl };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_kind_from_string(const std::string& name);

// Lower-triangular accuracy grid: row(t)[k] is the accuracy on task k
// (0-based) measured after finishing task t. Row t has t+1 entries.
struct AccuracyMatrix {
  std::vector<std::vector<double>> rows;

  std::size_t num_tasks() const { return rows.size(); }
  void validate() const;

  bool operator==(const AccuracyMatrix&) const = default;
};

struct RunReport {
  AccuracyMatrix acc_matrix;
  double acc = 0.0;
  double bwt = 0.0;
  OptimizerKind optimizer = OptimizerKind::sgd;
  NetworkSpec net_spec;      // config snapshot
  TrainConfig train_config;  // config snapshot
  double wall_time = 0.0;    // seconds; everything else is deterministic
};

// Mean accuracy over the final row, and mean decline of each task's
// accuracy between its own row and the final row (0 when only one task).
// Throws on an incomplete matrix.
std::pair<double, double> acc_bwt(const AccuracyMatrix& r);

// Fraction of samples whose argmax logit equals the label, forwarding with
// the task's encoding. Ties resolve to the lowest class index.
double evaluate(const Network& net, std::span<const Sample> data, int task);

// The continual training loop: tasks in order, steps_per_task averaged
// mini-batch steps each (batches cycle through a per-task deterministic
// shuffle), parameters carried across tasks. With the rgo optimizer every
// per-sample gradient is projection-modified before batch averaging and the
// projections absorb the task at its end; with sgd the projections stay
// identity and nothing is consolidated. After each task the network is
// scored on every task seen so far, filling one accuracy-matrix row.
// alpha is the curvature ridge of the projection state; trained_out, when
// given, receives the final network.
RunReport run_continual(const NetworkSpec& spec, const TaskStream& stream, OptimizerKind optimizer,
                        const TrainConfig& config, Network* trained_out = nullptr,
                        double alpha = 1.0);

// One fresh network per task (seed derived as init_seed xor task id), plain
// sgd training; R[t][k] keeps task k's own score, so bwt is exactly zero.
RunReport run_stl(const NetworkSpec& spec, const TaskStream& stream, const TrainConfig& config);

}  // namespace rgo
