#include "ueba/nn/serialize.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ueba::nn {

std::vector<LayerManifest> describe(const CompositionNet& net) {
  std::vector<LayerManifest> out;
  out.reserve(net.layers.size());
  for (const auto& l : net.layers) {
    LayerManifest m;
    m.in_dim = l.affine.in_dim();
    m.out_dim = l.affine.out_dim();
    for (auto a : l.activations) m.activation_tags.push_back(to_string(a));
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<double> flatten_parameters(const CompositionNet& net) {
  std::vector<double> flat;
  flat.reserve(net.parameter_count());
  for (const auto& l : net.layers) {
    const double* w = l.affine.weights.data();
    flat.insert(flat.end(), w, w + l.affine.weights.size());
    flat.insert(flat.end(), l.affine.bias.begin(), l.affine.bias.end());
  }
  return flat;
}

void unflatten_parameters(CompositionNet& net, const std::vector<double>& flat) {
  if (flat.size() != net.parameter_count())
    throw std::invalid_argument("unflatten_parameters: size mismatch");
  std::size_t k = 0;
  for (auto& l : net.layers) {
    double* w = l.affine.weights.data();
    for (std::size_t i = 0; i < l.affine.weights.size(); ++i) w[i] = flat[k++];
    for (auto& b : l.affine.bias) b = flat[k++];
  }
}

void write_weight_blob(const std::filesystem::path& path, const CompositionNet& net) {
  static_assert(sizeof(double) == 8);
  auto flat = flatten_parameters(net);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for write: " + path.string());
  // Platform is little-endian; doubles are written as-is.
  f.write(reinterpret_cast<const char*>(flat.data()),
          static_cast<std::streamsize>(flat.size() * sizeof(double)));
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

CompositionNet read_weight_blob(const std::filesystem::path& path,
                                const std::vector<LayerManifest>& manifest) {
  CompositionNet net;
  std::size_t total = 0;
  for (const auto& m : manifest) {
    CompositionNet::Layer layer;
    layer.affine.weights = Matrix(m.out_dim, m.in_dim);
    layer.affine.bias.resize(m.out_dim);
    if (m.activation_tags.size() != m.out_dim)
      throw std::invalid_argument("read_weight_blob: activation tag count mismatch");
    for (const auto& tag : m.activation_tags)
      layer.activations.push_back(activation_from_string(tag));
    total += m.out_dim * m.in_dim + m.out_dim;
    net.layers.push_back(std::move(layer));
  }

  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path.string());
  std::vector<double> flat(total);
  f.read(reinterpret_cast<char*>(flat.data()),
         static_cast<std::streamsize>(total * sizeof(double)));
  if (f.gcount() != static_cast<std::streamsize>(total * sizeof(double)))
    throw std::runtime_error("weight blob truncated: " + path.string());
  unflatten_parameters(net, flat);
  net.validate();
  return net;
}

}  // namespace ueba::nn
