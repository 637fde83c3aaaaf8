#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ueba/matrix.hpp"
#include "ueba/nn/adam.hpp"
#include "ueba/nn/composition_net.hpp"

namespace ueba::ae {

/// Under-complete architecture. Defaults follow the 83 -> 64/32/16/8/16/32/64
/// -> 83 layout with tanh on the first and last layers and ELU inside.
struct AutoencoderSpec {
  std::size_t input_dim = 83;
  std::vector<std::size_t> hidden = {64, 32, 16, 8, 16, 32, 64};
  std::size_t latent_dim = 8;

  /// Throws unless latent_dim < input_dim and latent_dim appears exactly once
  /// in hidden.
  void validate() const;
};

struct AutoencoderModel {
  AutoencoderSpec spec;
  nn::CompositionNet encoder;  // input_dim -> latent_dim
  nn::CompositionNet decoder;  // latent_dim -> input_dim
  double threshold = 0.0;      // tau; calibrated 95th-percentile score
  std::string role;
  std::uint64_t seed = 0;
  std::string trained_at;  // optional, informational only

  /// Encoder and decoder concatenated for training as one reconstruction net.
  nn::CompositionNet combined() const;
  void set_from_combined(const nn::CompositionNet& net);
};

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 200;
  std::size_t patience = 10;
  double validation_fraction = 0.20;
  double l1_lambda = 1e-3;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainReport {
  std::vector<double> train_mse;
  std::vector<double> validation_mse;
  std::size_t stopped_epoch = 0;  // 1-based count of epochs actually run
  std::size_t best_epoch = 0;     // 1-based
  double best_validation_mse = 0.0;
  double threshold = 0.0;
};

struct ScoreReport {
  std::vector<double> input;           // scaled input
  std::vector<double> reconstruction;  // decoder(encoder(input))
  std::vector<double> residual;        // input - reconstruction
  double score = 0.0;                  // L1 norm of the residual
  bool anomaly = false;                // score >= threshold
};

AutoencoderModel build(const AutoencoderSpec& spec, std::uint64_t seed);

/// Sum over rows of squared Euclidean distance between the row and its
/// reconstruction.
double reconstruction_error(const AutoencoderModel& model, const Matrix& X);

/// Mini-batch Adam with early stopping on a shuffled validation split drawn
/// from X_train (the last validation_fraction of the shuffled index order).
/// Restores the best epoch's parameters, then calibrates the threshold on the
/// validation split. X_train must already be scaled.
TrainReport train(AutoencoderModel& model, const Matrix& X_train, const TrainConfig& cfg);

/// Nearest-rank 95th percentile of L1 scores over X_val: the order statistic
/// at 1-based index ceil(0.95 * n).
double calibrate_threshold(AutoencoderModel& model, const Matrix& X_val);

ScoreReport score(const AutoencoderModel& model, const std::vector<double>& scaled_input);

/// Fraction of rows whose score is >= the model threshold.
double positive_rate(const AutoencoderModel& model, const Matrix& X);

}  // namespace ueba::ae
