#include "ueba/nn/composition_net.hpp"

#include <stdexcept>
#include <string>

namespace ueba::nn {

std::vector<std::size_t> CompositionNet::dims() const {
  std::vector<std::size_t> d;
  if (layers.empty()) return d;
  d.push_back(layers.front().affine.in_dim());
  for (const auto& l : layers) d.push_back(l.affine.out_dim());
  return d;
}

void CompositionNet::validate() const {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.affine.bias.size() != layer.affine.out_dim())
      throw std::invalid_argument("layer " + std::to_string(l) + ": bias length " +
                                  std::to_string(layer.affine.bias.size()) +
                                  " != output width " + std::to_string(layer.affine.out_dim()));
    if (layer.activations.size() != layer.affine.out_dim())
      throw std::invalid_argument("layer " + std::to_string(l) + ": activation vector length " +
                                  std::to_string(layer.activations.size()) +
                                  " != output width " + std::to_string(layer.affine.out_dim()));
    if (l > 0 && layer.affine.in_dim() != layers[l - 1].affine.out_dim())
      throw std::invalid_argument("layer " + std::to_string(l) + ": input width " +
                                  std::to_string(layer.affine.in_dim()) +
                                  " != previous output width " +
                                  std::to_string(layers[l - 1].affine.out_dim()));
  }
}

std::size_t CompositionNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.affine.weights.size() + l.affine.bias.size();
  return n;
}

CompositionNet::Layer make_layer(Matrix weights, std::vector<double> bias, ActivationKind act) {
  CompositionNet::Layer layer;
  std::size_t out = weights.rows();
  layer.affine.weights = std::move(weights);
  layer.affine.bias = std::move(bias);
  layer.activations.assign(out, act);
  return layer;
}

std::vector<double> forward_composition(const CompositionNet& net, const std::vector<double>& x) {
  if (net.layers.empty()) throw std::invalid_argument("forward_composition: empty network");
  if (x.size() != net.input_dim())
    throw std::invalid_argument("forward_composition: layer 0 expects input width " +
                                std::to_string(net.input_dim()) + ", got " +
                                std::to_string(x.size()));
  std::vector<double> h = x;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    if (h.size() != layer.affine.in_dim())
      throw std::invalid_argument("forward_composition: layer " + std::to_string(l) +
                                  " dimension mismatch");
    std::vector<double> z(layer.affine.out_dim());
    for (std::size_t i = 0; i < z.size(); ++i) {
      double acc = layer.affine.bias[i];
      const double* w = layer.affine.weights.row(i);
      for (std::size_t j = 0; j < h.size(); ++j) acc += w[j] * h[j];
      z[i] = activate(layer.activations[i], acc);
    }
    h = std::move(z);
  }
  return h;
}

ForwardTrace forward_trace(const CompositionNet& net, const std::vector<double>& x) {
  if (x.size() != net.input_dim())
    throw std::invalid_argument("forward_trace: input width mismatch at layer 0");
  ForwardTrace t;
  t.post.push_back(x);
  t.pre.reserve(net.layers.size());
  for (const auto& layer : net.layers) {
    const auto& h = t.post.back();
    std::vector<double> z(layer.affine.out_dim());
    std::vector<double> a(layer.affine.out_dim());
    for (std::size_t i = 0; i < z.size(); ++i) {
      double acc = layer.affine.bias[i];
      const double* w = layer.affine.weights.row(i);
      for (std::size_t j = 0; j < h.size(); ++j) acc += w[j] * h[j];
      z[i] = acc;
      a[i] = activate(layer.activations[i], acc);
    }
    t.pre.push_back(std::move(z));
    t.post.push_back(std::move(a));
  }
  return t;
}

}  // namespace ueba::nn
