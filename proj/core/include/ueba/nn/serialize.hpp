#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ueba/nn/composition_net.hpp"

namespace ueba::nn {

/// Per-layer descriptor for the manifest that accompanies a weight blob.
struct LayerManifest {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<std::string> activation_tags;
};

std::vector<LayerManifest> describe(const CompositionNet& net);

/// Weight blob format: for each layer, weights row-major then bias, all as
/// little-endian 64-bit floats, concatenated in layer order.
std::vector<double> flatten_parameters(const CompositionNet& net);
void unflatten_parameters(CompositionNet& net, const std::vector<double>& flat);

void write_weight_blob(const std::filesystem::path& path, const CompositionNet& net);

/// Rebuilds a network from a manifest plus blob.
CompositionNet read_weight_blob(const std::filesystem::path& path,
                                const std::vector<LayerManifest>& manifest);

}  // namespace ueba::nn
