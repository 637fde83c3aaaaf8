#pragma once

#include <cstddef>
#include <vector>

#include "ueba/matrix.hpp"
#include "ueba/nn/activation.hpp"

namespace ueba::nn {

/// One affine transform: y = W x + b, W is (n_out x n_in).
struct AffineLayer {
  Matrix weights;
  std::vector<double> bias;

  std::size_t in_dim() const { return weights.cols(); }
  std::size_t out_dim() const { return weights.rows(); }

  bool operator==(const AffineLayer&) const = default;
};

/// Feed-forward network as a composition of affine maps and per-unit
/// activations, applied in layer order.
struct CompositionNet {
  struct Layer {
    AffineLayer affine;
    std::vector<ActivationKind> activations;  // one per output unit

    bool operator==(const Layer&) const = default;
  };

  std::vector<Layer> layers;

  std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().affine.in_dim(); }
  std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().affine.out_dim(); }

  /// Widths n^(0) .. n^(d).
  std::vector<std::size_t> dims() const;

  /// Throws if layer widths or activation vector lengths are inconsistent.
  void validate() const;

  std::size_t parameter_count() const;

  bool operator==(const CompositionNet&) const = default;
};

/// Uniform layer constructor: every unit of the layer uses the same activation.
CompositionNet::Layer make_layer(Matrix weights, std::vector<double> bias, ActivationKind act);

std::vector<double> forward_composition(const CompositionNet& net, const std::vector<double>& x);

/// Forward pass keeping per-layer pre-activations and activations, for backprop.
struct ForwardTrace {
  std::vector<std::vector<double>> pre;   // z^(l) = A^(l) h^(l-1), l = 1..d
  std::vector<std::vector<double>> post;  // h^(l) = Phi^(l)(z^(l)); post[0] is the input
};

ForwardTrace forward_trace(const CompositionNet& net, const std::vector<double>& x);

}  // namespace ueba::nn
