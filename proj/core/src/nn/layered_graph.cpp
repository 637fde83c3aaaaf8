#include "ueba/nn/layered_graph.hpp"

#include <stdexcept>
#include <string>

namespace ueba::nn {

std::vector<std::size_t> LayeredGraphNet::dims() const {
  std::vector<std::size_t> d{input_size};
  for (const auto& layer : layers) d.push_back(layer.size());
  return d;
}

std::size_t LayeredGraphNet::edge_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers)
    for (const auto& neuron : layer) n += neuron.incoming.size();
  return n;
}

void LayeredGraphNet::validate() const {
  std::size_t prev_width = input_size;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    for (std::size_t i = 0; i < layers[l].size(); ++i) {
      for (const auto& e : layers[l][i].incoming) {
        if (e.from >= prev_width)
          throw std::invalid_argument(
              "non-layered edge: layer " + std::to_string(l) + " neuron " + std::to_string(i) +
              " references node " + std::to_string(e.from) + " but previous layer has width " +
              std::to_string(prev_width));
      }
    }
    prev_width = layers[l].size();
  }
}

std::vector<double> forward_graph(const LayeredGraphNet& net, const std::vector<double>& x) {
  if (x.size() != net.input_size)
    throw std::invalid_argument("forward_graph: expected input width " +
                                std::to_string(net.input_size) + ", got " +
                                std::to_string(x.size()));
  net.validate();
  std::vector<double> h = x;
  for (const auto& layer : net.layers) {
    std::vector<double> next(layer.size());
    for (std::size_t i = 0; i < layer.size(); ++i) {
      double acc = layer[i].bias;
      for (const auto& e : layer[i].incoming) acc += e.weight * h[e.from];
      next[i] = activate(layer[i].activation, acc);
    }
    h = std::move(next);
  }
  return h;
}

LayeredGraphNet composition_to_graph(const CompositionNet& net) {
  net.validate();
  LayeredGraphNet g;
  g.input_size = net.input_dim();
  for (const auto& layer : net.layers) {
    std::vector<Neuron> nodes(layer.affine.out_dim());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      Neuron& n = nodes[i];
      n.bias = layer.affine.bias[i];
      n.activation = layer.activations[i];
      n.incoming.reserve(layer.affine.in_dim());
      for (std::size_t j = 0; j < layer.affine.in_dim(); ++j)
        n.incoming.push_back({j, layer.affine.weights(i, j)});
    }
    g.layers.push_back(std::move(nodes));
  }
  return g;
}

CompositionNet graph_to_composition(const LayeredGraphNet& net) {
  net.validate();
  CompositionNet c;
  std::size_t prev_width = net.input_size;
  for (const auto& layer : net.layers) {
    CompositionNet::Layer out;
    out.affine.weights = Matrix(layer.size(), prev_width);
    out.affine.bias.resize(layer.size());
    out.activations.resize(layer.size());
    for (std::size_t i = 0; i < layer.size(); ++i) {
      out.affine.bias[i] = layer[i].bias;
      out.activations[i] = layer[i].activation;
      for (const auto& e : layer[i].incoming) out.affine.weights(i, e.from) = e.weight;
    }
    prev_width = layer.size();
    c.layers.push_back(std::move(out));
  }
  return c;
}

}  // namespace ueba::nn
