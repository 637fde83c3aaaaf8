#pragma once

#include <cstddef>
#include <vector>

#include "ueba/nn/activation.hpp"
#include "ueba/nn/composition_net.hpp"

namespace ueba::nn {

/// One node of the graph form: weighted edges from the previous layer,
/// a bias, and an activation. Edges are sparse; a missing edge means
/// weight zero when converting back to the dense affine form.
struct Neuron {
  struct Edge {
    std::size_t from;  // node index in the previous layer
    double weight;

    bool operator==(const Edge&) const = default;
  };
  std::vector<Edge> incoming;
  double bias = 0.0;
  ActivationKind activation = ActivationKind::Identity;

  bool operator==(const Neuron&) const = default;
};

/// Layered-graph network: layer 0 holds plain input nodes, layers 1..d hold
/// neurons whose edges may only reach back one layer.
struct LayeredGraphNet {
  std::size_t input_size = 0;
  std::vector<std::vector<Neuron>> layers;  // layers[0] is the first neuron layer

  std::vector<std::size_t> dims() const;
  std::size_t edge_count() const;

  /// Rejects edges referencing nodes outside the previous layer; the error
  /// message names the offending layer, neuron, and edge.
  void validate() const;

  bool operator==(const LayeredGraphNet&) const = default;
};

std::vector<double> forward_graph(const LayeredGraphNet& net, const std::vector<double>& x);

LayeredGraphNet composition_to_graph(const CompositionNet& net);

/// Missing edges become zero weights in the dense form.
CompositionNet graph_to_composition(const LayeredGraphNet& net);

}  // namespace ueba::nn
