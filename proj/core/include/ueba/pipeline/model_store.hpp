#pragma once

#include <filesystem>
#include <string>

#include "ueba/autoencoder.hpp"
#include "ueba/doc2vec.hpp"
#include "ueba/features.hpp"
#include "ueba/pipeline/config.hpp"

namespace ueba::pipeline {

/// Everything needed to score new windows bit-exactly.
struct ModelBundle {
  ae::AutoencoderModel autoencoder;
  feat::ScalerParams scaler;
  d2v::Doc2VecModel doc2vec;
  PipelineConfig config;
};

/// FNV-1a 64 of a file's bytes, lowercase hex.
std::string file_content_hash(const std::filesystem::path& path);

/// Directory layout: manifest.json, encoder.bin, decoder.bin, scaler.json,
/// doc_vectors.bin, word_vectors.bin, vocab.txt. The bundle is written to a
/// temporary sibling directory and renamed into place.
void save_model(const std::filesystem::path& store_dir, const ModelBundle& bundle);

/// Verifies content hashes on load.
ModelBundle load_model(const std::filesystem::path& store_dir);

/// Hash and consistency checks without fully loading; throws on mismatch.
void verify_store(const std::filesystem::path& store_dir);

}  // namespace ueba::pipeline
