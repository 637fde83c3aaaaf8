#pragma once

#include <cstdint>
#include <vector>

#include "ueba/nn/composition_net.hpp"
#include "ueba/nn/gradients.hpp"

namespace ueba::nn {

/// Bias-corrected Adam over the flattened parameter vector of a CompositionNet.
struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  std::vector<double> m;  // first moment, flat
  std::vector<double> v;  // second moment, flat

  static AdamState init(const CompositionNet& net, double learning_rate = 1e-3);
};

void adam_step(CompositionNet& net, const GradientSet& grads, AdamState& state);

}  // namespace ueba::nn
