#include "ueba/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace ueba::nn {

AdamState AdamState::init(const CompositionNet& net, double learning_rate) {
  AdamState s;
  s.learning_rate = learning_rate;
  s.m.assign(net.parameter_count(), 0.0);
  s.v.assign(net.parameter_count(), 0.0);
  return s;
}

void adam_step(CompositionNet& net, const GradientSet& grads, AdamState& state) {
  if (grads.layers.size() != net.layers.size())
    throw std::invalid_argument("adam_step: gradient layer count mismatch");
  if (state.m.size() != net.parameter_count())
    throw std::invalid_argument("adam_step: state size mismatch");

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);

  std::size_t k = 0;
  auto update = [&](double& param, double grad) {
    state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * grad;
    state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * grad * grad;
    double m_hat = state.m[k] / bc1;
    double v_hat = state.v[k] / bc2;
    param -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    ++k;
  };

  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto& affine = net.layers[l].affine;
    const auto& lg = grads.layers[l];
    if (lg.d_weights.rows() != affine.weights.rows() ||
        lg.d_weights.cols() != affine.weights.cols())
      throw std::invalid_argument("adam_step: gradient shape mismatch at layer " +
                                  std::to_string(l));
    for (std::size_t i = 0; i < affine.weights.size(); ++i)
      update(affine.weights.data()[i], lg.d_weights.data()[i]);
    for (std::size_t i = 0; i < affine.bias.size(); ++i) update(affine.bias[i], lg.d_bias[i]);
  }
}

}  // namespace ueba::nn
