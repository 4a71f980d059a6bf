#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "rgo/network.hpp"

namespace rgo {

struct VerifyOptions {
  // Test-only hook: name of a property to sabotage mid-run, proving the
  // suite actually detects violations. Empty in normal operation.
  std::string inject_fault;
};

// Runs every module-level property check, printing one PASS/FAIL line per
// property to `out`. Returns the number of failures (0 means a clean suite).
int run_verify_suite(const VerifyOptions& options, std::ostream& out);

// --- reusable property measurements (shared with the acceptance suite) ---

// Iterated rank-one updates vs. the dense inverse of I + (1/alpha) sum(ggT):
// largest entrywise deviation over n_grads random gradients.
double sherman_morrison_max_err(std::uint64_t seed, std::size_t dim, std::size_t n_grads,
                                double alpha = 1.0);

// Backward pass vs. central finite differences of the loss, on a network
// with task-specific encoding active. Samples `per_layer` weights per layer
// plus every bias; returns the largest relative deviation
// |analytic - numeric| / max(1, |analytic|, |numeric|).
double gradient_check_max_rel_err(const NetworkSpec& spec, int task, std::uint64_t seed,
                                  std::size_t per_layer);

// Logit-space curvature matrix vs. numerical differentiation of the loss
// gradient; returns the largest absolute deviation on random logits.
double softmax_curvature_max_err(std::uint64_t seed, std::size_t n_logits);

struct TraceMcResult {
  double ratio = 0.0;        // mean(gT P_hat g) / mean(gT g) over Gaussian g
  double trace_error = 0.0;  // |trace(P_hat) - dim|
};

// Monte-Carlo check that the trace-normalized projector preserves the
// expected squared gradient magnitude under isotropic gradients.
TraceMcResult trace_normalization_mc(std::uint64_t seed, std::size_t dim, std::size_t n_draws);

struct QuadraticBoundTrial {
  double realized = 0.0;  // past-loss increase actually reached
  double bound = 0.0;     // eigenvalue bound computed up front
};

// Two-task quadratic toy: task one's optimum anchors the quadratic
// past-loss estimate, task two runs projected gradient descent with the
// closed-form normalized inverse-curvature projector (dim <= 8, steps <=
// 100, learning rate <= 0.1, drawn from the seed).
QuadraticBoundTrial quadratic_bound_trial(std::uint64_t seed);

// Trains one task from the same seed under the projected and plain arms;
// returns the largest parameter difference (identity projections make the
// two arithmetic paths coincide).
double first_task_equivalence_max_err(std::uint64_t seed);

}  // namespace rgo
