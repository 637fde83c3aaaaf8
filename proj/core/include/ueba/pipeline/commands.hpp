#pragma once

#include <filesystem>
#include <optional>

#include "ueba/pipeline/config.hpp"
#include "ueba/pipeline/model_store.hpp"

namespace ueba::pipeline {

/// Generate synthetic raw events as JSONL (plus the profile used, for the
/// record).
void cmd_synth(const PipelineConfig& cfg, const std::filesystem::path& out_dir);

/// Aggregate a JSONL event file into the windowed feature CSV. All users in
/// the file are mapped to the configured role.
void cmd_featurize(const std::filesystem::path& events_path, const PipelineConfig& cfg,
                   const std::filesystem::path& out_csv);

/// Full training: Doc2Vec on the process lists, embedding attachment, scaler
/// fit, autoencoder training with early stopping, threshold calibration, and
/// model store publication. Returns the training report.
ae::TrainReport cmd_train(const std::filesystem::path& features_csv, const PipelineConfig& cfg,
                          const std::filesystem::path& store_dir);

/// Score events (.jsonl) or a feature CSV against a stored model, emitting one
/// JSON ScoreReport per line.
void cmd_score(const std::filesystem::path& store_dir, const std::filesystem::path& input_path,
               const std::filesystem::path& out_jsonl);

/// Convex-interpolation stress test: builds the labelled test set from clean
/// feature rows and anomaly templates (defaults derived from the data when no
/// template file is given), scores it, and writes the test set and
/// detection-curve CSVs.
void cmd_stress(const std::filesystem::path& store_dir, const std::filesystem::path& features_csv,
                const std::optional<std::filesystem::path>& templates_json,
                const std::filesystem::path& out_dir);

/// Diagnostic bundle: per-feature errors, t-SNE embeddings, positive rate.
void cmd_diagnose(const std::filesystem::path& store_dir, const std::filesystem::path& features_csv,
                  const std::filesystem::path& out_dir);

/// Store integrity and invariant self-checks.
void cmd_verify(const std::filesystem::path& store_dir);

/// Shared by train/score/stress: attach embeddings to feature records. The
/// inference seed for each window derives from the model seed and the window
/// key, so a window embeds identically wherever it appears.
Matrix embed_records(const std::vector<feat::FeatureRecord>& records,
                     const d2v::Doc2VecModel& model, std::uint64_t model_seed);

}  // namespace ueba::pipeline
