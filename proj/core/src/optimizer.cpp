#include "rgo/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace rgo {

ProjectionState init_projections(const Network& net, double alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("init_projections: alpha must be positive");
  ProjectionState state;
  state.alpha = alpha;
  for (std::size_t l = 0; l < net.num_layers(); ++l)
    state.projections.push_back(Matrix::identity(net.spec.layer_widths[l + 1]));
  return state;
}

LayerGrads modify_grads(const ProjectionState& state, const LayerGrads& grads) {
  if (state.projections.size() != grads.num_layers())
    throw std::invalid_argument("modify_grads: layer count mismatch");

  LayerGrads out;
  const std::size_t layers = grads.num_layers();
  out.weight_grads.resize(layers);
  out.bias_grads.resize(layers);
  out.deltas.resize(layers);
  out.inputs.resize(layers);

  for (std::size_t l = 0; l < layers; ++l) {
    const Matrix& p = state.projections[l];
    const double tr = trace(p);
    if (tr <= 0.0)
      throw std::runtime_error("modify_grads: projection trace is non-positive at layer " +
                               std::to_string(l));
    const double s = static_cast<double>(p.rows()) / tr;
    Vector projected = mat_vec(p, grads.deltas[l]);
    for (auto& e : projected) e *= s;
    out.inputs[l] = grads.inputs[l];
    out.weight_grads[l] = outer(projected, grads.inputs[l]);
    out.bias_grads[l] = projected;
    out.deltas[l] = std::move(projected);
  }
  return out;
}

Matrix rls_update(const Matrix& p, const Vector& g, double alpha) {
  if (p.rows() != p.cols() || p.rows() != g.size())
    throw std::invalid_argument("rls_update: shape mismatch");
  const Vector v = mat_vec(p, g);
  const double denom = alpha + dot(g, v);
  Matrix next = p;
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j) next(i, j) -= v[i] * v[j] / denom;
  return next;
}

void consolidate_task(ProjectionState& state, const Network& net,
                      std::span<const Sample> data, int task) {
  for (const Sample& sample : data) {
    auto [logits, cache] = forward(net, sample.x, task);
    const Matrix curv = softmax_second_derivative(logits);
    const std::size_t y = static_cast<std::size_t>(sample.label);
    const double c = std::sqrt(curv(y, y));
    const std::vector<Vector> deltas = logit_backprop(net, cache, y);
    for (std::size_t l = 0; l < state.projections.size(); ++l) {
      Vector g = deltas[l];
      for (auto& e : g) e *= c;
      state.projections[l] = rls_update(state.projections[l], g, state.alpha);
    }
    ++state.samples_absorbed;
  }
}

void sgd_step(Network& net, const LayerGrads& grads, double lr) {
  if (grads.num_layers() != net.num_layers())
    throw std::invalid_argument("sgd_step: layer count mismatch");
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    Matrix& w = net.weights[l];
    const Matrix& dw = grads.weight_grads[l];
    if (w.rows() != dw.rows() || w.cols() != dw.cols())
      throw std::invalid_argument("sgd_step: weight shape mismatch");
    for (std::size_t i = 0; i < w.data().size(); ++i) w.data()[i] -= lr * dw.data()[i];
    for (std::size_t i = 0; i < net.biases[l].size(); ++i)
      net.biases[l][i] -= lr * grads.bias_grads[l][i];
  }
}

Matrix accumulated_curvature(const ProjectionState& state, std::size_t layer) {
  return scale(invert(state.projections.at(layer)), state.alpha);
}

double past_loss_estimate(const Vector& theta, const Vector& theta_prev, const Matrix& curvature) {
  if (theta.size() != theta_prev.size() || curvature.rows() != theta.size())
    throw std::invalid_argument("past_loss_estimate: dimension mismatch");
  Vector d(theta.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = theta[i] - theta_prev[i];
  return 0.5 * dot(d, mat_vec(curvature, d));
}

double past_loss_bound(std::size_t n_steps, double eta_max, const Matrix& projection,
                       const Matrix& curvature, double prev_loss) {
  const double sigma = max_eigenvalue(symmetrize(matmul(projection, curvature)));
  return 0.5 * static_cast<double>(n_steps) * eta_max * sigma * prev_loss;
}

}  // namespace rgo
