#include "ueba/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ueba/nn/gradients.hpp"
#include "ueba/rng.hpp"

namespace ueba::ae {

void AutoencoderSpec::validate() const {
  if (input_dim == 0) throw std::invalid_argument("AutoencoderSpec: input_dim must be positive");
  if (hidden.empty()) throw std::invalid_argument("AutoencoderSpec: hidden widths required");
  if (latent_dim >= input_dim)
    throw std::invalid_argument("AutoencoderSpec: latent_dim must be < input_dim (under-complete)");
  if (std::count(hidden.begin(), hidden.end(), latent_dim) != 1)
    throw std::invalid_argument("AutoencoderSpec: latent_dim must appear exactly once in hidden");
  for (auto w : hidden)
    if (w == 0) throw std::invalid_argument("AutoencoderSpec: zero hidden width");
}

void TrainConfig::validate() const {
  if (validation_fraction <= 0.0 || validation_fraction >= 1.0)
    throw std::invalid_argument("TrainConfig: validation_fraction must be in (0,1)");
  if (patience < 1) throw std::invalid_argument("TrainConfig: patience must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (max_epochs < 1) throw std::invalid_argument("TrainConfig: max_epochs must be >= 1");
  if (l1_lambda < 0.0) throw std::invalid_argument("TrainConfig: l1_lambda must be >= 0");
}

nn::CompositionNet AutoencoderModel::combined() const {
  nn::CompositionNet net;
  net.layers = encoder.layers;
  net.layers.insert(net.layers.end(), decoder.layers.begin(), decoder.layers.end());
  return net;
}

void AutoencoderModel::set_from_combined(const nn::CompositionNet& net) {
  const std::size_t enc_depth = encoder.layers.size();
  if (net.layers.size() != enc_depth + decoder.layers.size())
    throw std::invalid_argument("set_from_combined: depth mismatch");
  for (std::size_t l = 0; l < enc_depth; ++l) encoder.layers[l] = net.layers[l];
  for (std::size_t l = 0; l < decoder.layers.size(); ++l)
    decoder.layers[l] = net.layers[enc_depth + l];
}

namespace {

nn::CompositionNet::Layer init_layer(std::size_t in, std::size_t out, nn::ActivationKind act,
                                     Rng& rng) {
  // uniform(-a, a), a = sqrt(6 / (fan_in + fan_out))
  double a = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> dist(-a, a);
  Matrix w(out, in);
  for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
  return nn::make_layer(std::move(w), std::vector<double>(out, 0.0), act);
}

std::vector<double> scores_for(const AutoencoderModel& model, const Matrix& X) {
  std::vector<double> s(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) s[r] = score(model, X.row_vec(r)).score;
  return s;
}

double validation_mse(const nn::CompositionNet& net, const Matrix& X,
                      const std::vector<std::size_t>& idx) {
  double acc = 0.0;
  const std::size_t n_out = net.output_dim();
  for (auto r : idx) {
    auto y = forward_composition(net, X.row_vec(r));
    const double* x = X.row(r);
    for (std::size_t i = 0; i < n_out; ++i) {
      double d = y[i] - x[i];
      acc += d * d;
    }
  }
  return idx.empty() ? 0.0 : acc / static_cast<double>(idx.size() * n_out);
}

}  // namespace

AutoencoderModel build(const AutoencoderSpec& spec, std::uint64_t seed) {
  spec.validate();
  AutoencoderModel model;
  model.spec = spec;
  model.seed = seed;
  Rng rng(derive_seed(seed, "autoencoder-init"));

  auto latent_it = std::find(spec.hidden.begin(), spec.hidden.end(), spec.latent_dim);
  std::size_t latent_pos = static_cast<std::size_t>(latent_it - spec.hidden.begin());

  // Full width sequence: input, hidden..., input. First and last layers tanh,
  // everything in between ELU.
  std::vector<std::size_t> widths;
  widths.push_back(spec.input_dim);
  widths.insert(widths.end(), spec.hidden.begin(), spec.hidden.end());
  widths.push_back(spec.input_dim);

  const std::size_t depth = widths.size() - 1;
  for (std::size_t l = 0; l < depth; ++l) {
    nn::ActivationKind act =
        (l == 0 || l == depth - 1) ? nn::ActivationKind::Tanh : nn::ActivationKind::Elu;
    auto layer = init_layer(widths[l], widths[l + 1], act, rng);
    if (l <= latent_pos)
      model.encoder.layers.push_back(std::move(layer));
    else
      model.decoder.layers.push_back(std::move(layer));
  }
  model.encoder.validate();
  model.decoder.validate();
  return model;
}

double reconstruction_error(const AutoencoderModel& model, const Matrix& X) {
  if (X.rows() == 0) return 0.0;
  if (X.cols() != model.spec.input_dim)
    throw std::invalid_argument("reconstruction_error: column count mismatch");
  auto net = model.combined();
  double total = 0.0;
  for (std::size_t r = 0; r < X.rows(); ++r) {
    auto y = forward_composition(net, X.row_vec(r));
    const double* x = X.row(r);
    for (std::size_t i = 0; i < X.cols(); ++i) {
      double d = y[i] - x[i];
      total += d * d;
    }
  }
  return total;
}

TrainReport train(AutoencoderModel& model, const Matrix& X_train, const TrainConfig& cfg) {
  cfg.validate();
  if (X_train.rows() < 10) throw std::invalid_argument("train: need at least 10 rows");
  if (X_train.cols() != model.spec.input_dim)
    throw std::invalid_argument("train: column count mismatch");

  // Shuffled split; the last validation_fraction of the shuffled order is held out.
  std::vector<std::size_t> order(X_train.rows());
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(derive_seed(cfg.seed, "train-split"));
  std::shuffle(order.begin(), order.end(), split_rng);
  std::size_t n_val = static_cast<std::size_t>(
      std::llround(cfg.validation_fraction * static_cast<double>(order.size())));
  n_val = std::clamp<std::size_t>(n_val, 1, order.size() - 1);
  std::vector<std::size_t> train_idx(order.begin(), order.end() - static_cast<long>(n_val));
  std::vector<std::size_t> val_idx(order.end() - static_cast<long>(n_val), order.end());

  nn::CompositionNet net = model.combined();
  nn::AdamState adam = nn::AdamState::init(net, cfg.learning_rate);
  Rng batch_rng(derive_seed(cfg.seed, "train-batches"));

  TrainReport report;
  nn::CompositionNet best_net = net;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t epochs_since_best = 0;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), batch_rng);
    double epoch_loss = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t start = 0; start < train_idx.size(); start += cfg.batch_size) {
      std::size_t end = std::min(start + cfg.batch_size, train_idx.size());
      Matrix batch(end - start, X_train.cols());
      for (std::size_t r = start; r < end; ++r) batch.set_row(r - start, X_train.row_vec(train_idx[r]));
      double loss = 0.0;
      auto grads = nn::gradients(net, batch, cfg.l1_lambda, &loss);
      if (!std::isfinite(loss))
        throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch + 1) +
                                 ", batch " + std::to_string(n_batches));
      nn::adam_step(net, grads, adam);
      epoch_loss += loss;
      ++n_batches;
    }
    report.train_mse.push_back(n_batches ? epoch_loss / static_cast<double>(n_batches) : 0.0);

    double val = validation_mse(net, X_train, val_idx);
    report.validation_mse.push_back(val);
    report.stopped_epoch = epoch + 1;

    if (val < best_val) {
      best_val = val;
      best_net = net;
      report.best_epoch = epoch + 1;
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (epochs_since_best >= cfg.patience) break;
    }
  }

  model.set_from_combined(best_net);
  report.best_validation_mse = best_val;

  Matrix X_val(val_idx.size(), X_train.cols());
  for (std::size_t i = 0; i < val_idx.size(); ++i) X_val.set_row(i, X_train.row_vec(val_idx[i]));
  report.threshold = calibrate_threshold(model, X_val);
  return report;
}

double calibrate_threshold(AutoencoderModel& model, const Matrix& X_val) {
  if (X_val.rows() == 0) throw std::invalid_argument("calibrate_threshold: empty validation set");
  auto s = scores_for(model, X_val);
  std::sort(s.begin(), s.end());
  // nearest-rank: 1-based index ceil(0.95 n)
  std::size_t rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(s.size())));
  model.threshold = s[rank - 1];
  return model.threshold;
}

ScoreReport score(const AutoencoderModel& model, const std::vector<double>& scaled_input) {
  if (scaled_input.size() != model.spec.input_dim)
    throw std::invalid_argument("score: expected " + std::to_string(model.spec.input_dim) +
                                " features, got " + std::to_string(scaled_input.size()));
  ScoreReport r;
  r.input = scaled_input;
  auto latent = forward_composition(model.encoder, scaled_input);
  r.reconstruction = forward_composition(model.decoder, latent);
  r.residual.resize(scaled_input.size());
  for (std::size_t i = 0; i < scaled_input.size(); ++i) {
    r.residual[i] = scaled_input[i] - r.reconstruction[i];
    r.score += std::abs(r.residual[i]);
  }
  r.anomaly = r.score >= model.threshold;
  return r;
}

double positive_rate(const AutoencoderModel& model, const Matrix& X) {
  if (X.rows() == 0) throw std::invalid_argument("positive_rate: empty matrix");
  std::size_t flagged = 0;
  for (std::size_t r = 0; r < X.rows(); ++r)
    if (score(model, X.row_vec(r)).anomaly) ++flagged;
  return static_cast<double>(flagged) / static_cast<double>(X.rows());
}

}  // namespace ueba::ae
