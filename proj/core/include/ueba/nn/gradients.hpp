#pragma once

#include <vector>

#include "ueba/matrix.hpp"
#include "ueba/nn/composition_net.hpp"

namespace ueba::nn {

/// Partials shaped like the network parameters.
struct GradientSet {
  struct LayerGrad {
    Matrix d_weights;
    std::vector<double> d_bias;
  };
  std::vector<LayerGrad> layers;

  static GradientSet zeros_like(const CompositionNet& net);
};

/// Reconstruction loss: mean over batch rows and over output coordinates of
/// squared error against the row itself, plus l1_lambda * sum|w| over weights
/// (biases are not penalized). Returns the loss value.
double reconstruction_loss(const CompositionNet& net, const Matrix& batch, double l1_lambda);

/// Reverse-mode gradients of the loss above. Subgradient of |w| at 0 is 0.
/// Throws on non-finite intermediates, naming the layer.
GradientSet gradients(const CompositionNet& net, const Matrix& batch, double l1_lambda,
                      double* loss_out = nullptr);

}  // namespace ueba::nn
