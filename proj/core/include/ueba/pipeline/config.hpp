#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "ueba/autoencoder.hpp"
#include "ueba/doc2vec.hpp"
#include "ueba/eval/tsne.hpp"
#include "ueba/features.hpp"

namespace ueba::pipeline {

struct SynthConfig {
  std::size_t num_users = 20;
  std::size_t num_days = 14;
  std::optional<std::filesystem::path> profile_path;  // default role profile when absent
};

/// Everything one pipeline run needs; serialized as JSON and snapshotted into
/// the model store manifest.
struct PipelineConfig {
  feat::Role role = feat::Role::CM;
  std::uint64_t seed = 0;
  std::int64_t window_seconds = 3600;
  ae::AutoencoderSpec autoencoder;
  ae::TrainConfig train;
  d2v::Doc2VecParams doc2vec;
  eval::TsneConfig tsne;
  SynthConfig synth;
  bool stress_fixed_z = false;  // reuse one normal row per template across the grid

  void validate() const;
};

/// Role defaults: learning rate 0.001 / batch 64 for CM, 0.01 / 256 for EP.
PipelineConfig default_config(feat::Role role);

PipelineConfig read_config_json(const std::filesystem::path& path);
void write_config_json(const std::filesystem::path& path, const PipelineConfig& cfg);

/// JSON snapshot (the same schema as the config file).
std::string config_to_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(const std::string& text);

}  // namespace ueba::pipeline
