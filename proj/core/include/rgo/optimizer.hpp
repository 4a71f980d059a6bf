#pragma once

#include <cstddef>
#include <span>

#include "rgo/matrix.hpp"
#include "rgo/network.hpp"

namespace rgo {

// Per-layer projection matrices, the method's only cross-task memory.
// projections[l] lives in the pre-activation gradient space of layer l
// (out_l x out_l), starts as the identity, and is shrunk by rank-one
// recursive updates so that it tracks the inverse of the accumulated
// curvature alpha*I + sum(g g^T) of all consolidated tasks. Stored raw,
// without trace normalization; the normalization happens at use time in
// modify_grads.
struct ProjectionState {
  std::vector<Matrix> projections;
  double alpha = 1.0;
  std::size_t samples_absorbed = 0;
};

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t steps_per_task = 300;
  std::size_t batch_size = 10;
  // Maximum single-step learning rate, recorded for bound diagnostics.
  // Equals learning_rate under the constant schedule used here.
  double eta_max = 0.1;
};

// One identity matrix per layer, sized to the layer's output width.
ProjectionState init_projections(const Network& net, double alpha = 1.0);

// Trace-normalized gradient modification. Per layer:
//   scale   = dim(P)/trace(P)
//   delta'  = scale * (P * delta)
//   dW'     = outer(delta', layer input),  db' = delta'
// The weight gradient is re-formed from the projected delta (left-to-right),
// never as P times the stored gradient matrix. Throws if trace(P) <= 0.
LayerGrads modify_grads(const ProjectionState& state, const LayerGrads& grads);

// Rank-one recursive downdate
//   k = P g / (alpha + g^T P g),   P <- P - k (g^T P)
// which keeps P equal to the inverse of (P_prev^-1 + g g^T / alpha).
Matrix rls_update(const Matrix& p, const Vector& g, double alpha);

// End-of-task second pass. Per sample: forward, take the curvature of the
// loss at the ground-truth logit, c = sqrt(l''[y][y]), and feed
// g_l = c * (gradient of logit y w.r.t. z_l) into one rls_update per layer,
// in data order.
void consolidate_task(ProjectionState& state, const Network& net,
                      std::span<const Sample> data, int task);

// W -= lr * dW, b -= lr * db.
void sgd_step(Network& net, const LayerGrads& grads, double lr);

// alpha * P_l^-1, i.e. the accumulated curvature matrix the projection
// implicitly inverts. Diagnostic only; training never materializes it.
Matrix accumulated_curvature(const ProjectionState& state, std::size_t layer);

// Quadratic estimate of the total past-task loss increase for a parameter
// move: 0.5 * (theta - theta_prev)^T curvature (theta - theta_prev).
double past_loss_estimate(const Vector& theta, const Vector& theta_prev, const Matrix& curvature);

// Upper bound on the reachable past-loss increase after n_steps of projected
// descent: 0.5 * n_steps * eta_max * max_eig(sym(P*curvature)) * prev_loss.
// P*curvature has real positive eigenvalues for SPD factors; symmetrizing
// keeps power iteration stable and can only loosen the bound.
double past_loss_bound(std::size_t n_steps, double eta_max, const Matrix& projection,
                       const Matrix& curvature, double prev_loss);

}  // namespace rgo
