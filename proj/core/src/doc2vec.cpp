#include "ueba/doc2vec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ueba/rng.hpp"

namespace ueba::d2v {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::size_t sample_from_cdf(const std::vector<double>& cdf, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto it = std::lower_bound(cdf.begin(), cdf.end(), u(rng));
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

/// One negative-sampling round: document vector d predicts target word t.
/// Returns the round's loss contribution. Word vectors are frozen when
/// update_words is false (inference).
double sgns_round(double* d, Matrix& words, std::size_t target, std::size_t negative,
                  const std::vector<double>& cdf, double lr, std::size_t dim, Rng& rng,
                  bool update_words) {
  std::vector<double> d_accum(dim, 0.0);
  double loss = 0.0;
  for (std::size_t s = 0; s <= negative; ++s) {
    std::size_t w_idx;
    double label;
    if (s == 0) {
      w_idx = target;
      label = 1.0;
    } else {
      w_idx = sample_from_cdf(cdf, rng);
      if (w_idx == target) continue;
      label = 0.0;
    }
    double* w = words.row(w_idx);
    double dot = 0.0;
    for (std::size_t i = 0; i < dim; ++i) dot += d[i] * w[i];
    double f = sigmoid(dot);
    loss += label > 0.5 ? -std::log(std::max(f, 1e-12)) : -std::log(std::max(1.0 - f, 1e-12));
    double g = (label - f) * lr;
    for (std::size_t i = 0; i < dim; ++i) d_accum[i] += g * w[i];
    if (update_words)
      for (std::size_t i = 0; i < dim; ++i) w[i] += g * d[i];
  }
  for (std::size_t i = 0; i < dim; ++i) d[i] += d_accum[i];
  return loss;
}

std::vector<std::size_t> to_indices(const Vocabulary& vocab, const TokenSequence& tokens) {
  std::vector<std::size_t> idx;
  idx.reserve(tokens.size());
  for (const auto& t : tokens) {
    long long i = vocab.index_of(t);
    if (i >= 0) idx.push_back(static_cast<std::size_t>(i));
  }
  return idx;
}

}  // namespace

long long Vocabulary::index_of(const std::string& token) const {
  auto it = tokens.find(token);
  return it == tokens.end() ? -1 : static_cast<long long>(it->second.index);
}

void Doc2VecParams::validate() const {
  if (dim < 1) throw std::invalid_argument("Doc2VecParams: dim must be >= 1");
  if (epochs < 1) throw std::invalid_argument("Doc2VecParams: epochs must be >= 1");
  if (negative < 1) throw std::invalid_argument("Doc2VecParams: negative must be >= 1");
  if (window < 1) throw std::invalid_argument("Doc2VecParams: window must be >= 1");
  if (learning_rate <= 0.0) throw std::invalid_argument("Doc2VecParams: learning_rate must be > 0");
}

Vocabulary build_vocab(const std::vector<TokenSequence>& corpus, std::uint64_t min_count) {
  if (corpus.empty()) throw std::invalid_argument("build_vocab: empty corpus");
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& doc : corpus)
    for (const auto& tok : doc) {
      if (tok.empty()) throw std::invalid_argument("build_vocab: empty token");
      ++counts[tok];
    }

  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [tok, c] : counts)
    if (c >= min_count) kept.emplace_back(tok, c);
  if (kept.empty()) throw std::invalid_argument("build_vocab: all tokens below min_count");

  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary v;
  double pow_total = 0.0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    v.tokens[kept[i].first] = {i, kept[i].second};
    v.index_to_token.push_back(kept[i].first);
    v.total_count += kept[i].second;
    pow_total += std::pow(static_cast<double>(kept[i].second), 0.75);
  }
  double acc = 0.0;
  for (const auto& [tok, c] : kept) {
    acc += std::pow(static_cast<double>(c), 0.75) / pow_total;
    v.sampling_cdf.push_back(acc);
  }
  v.sampling_cdf.back() = 1.0;
  return v;
}

Doc2VecModel train_dbow(const std::vector<TokenSequence>& corpus, const Doc2VecParams& params) {
  params.validate();
  Doc2VecModel model;
  model.params = params;
  model.vocab = build_vocab(corpus, params.min_count);
  const std::size_t dim = params.dim;
  const std::size_t V = model.vocab.size();

  Rng rng(derive_seed(params.seed, "d2v-train"));
  std::uniform_real_distribution<double> init(-0.5 / static_cast<double>(dim),
                                              0.5 / static_cast<double>(dim));
  model.doc_vectors = Matrix(corpus.size(), dim);
  for (std::size_t i = 0; i < model.doc_vectors.size(); ++i) model.doc_vectors.data()[i] = init(rng);
  model.word_output_vectors = Matrix(V, dim);
  for (std::size_t i = 0; i < model.word_output_vectors.size(); ++i)
    model.word_output_vectors.data()[i] = init(rng);

  std::vector<std::vector<std::size_t>> docs(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    docs[d] = to_indices(model.vocab, corpus[d]);
    if (docs[d].empty()) ++model.skipped_empty_docs;
  }

  const double lr0 = params.learning_rate;
  const double lr_min = lr0 * 1e-4;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    double lr = lr0 - (lr0 - lr_min) * static_cast<double>(epoch) / static_cast<double>(params.epochs);
    double loss = 0.0;
    std::size_t rounds = 0;
    for (std::size_t d = 0; d < docs.size(); ++d) {
      const auto& doc = docs[d];
      if (doc.empty()) continue;
      std::uniform_int_distribution<std::size_t> pick(0, doc.size() - 1);
      for (std::size_t pos = 0; pos < doc.size(); ++pos) {
        for (std::size_t w = 0; w < params.window; ++w) {
          std::size_t target = doc[pick(rng)];
          loss += sgns_round(model.doc_vectors.row(d), model.word_output_vectors, target,
                             params.negative, model.vocab.sampling_cdf, lr, dim, rng, true);
          ++rounds;
        }
      }
    }
    model.epoch_loss.push_back(rounds ? loss / static_cast<double>(rounds) : 0.0);
  }
  return model;
}

InferResult infer_vector(const Doc2VecModel& model, const TokenSequence& tokens,
                         std::size_t steps, std::uint64_t seed) {
  const std::size_t dim = model.params.dim;
  InferResult out;
  auto doc = to_indices(model.vocab, tokens);
  if (doc.empty()) {
    out.vec.assign(dim, 0.0);
    out.degenerate = true;
    return out;
  }

  Rng rng(derive_seed(seed, "d2v-infer"));
  std::uniform_real_distribution<double> init(-0.5 / static_cast<double>(dim),
                                              0.5 / static_cast<double>(dim));
  out.vec.resize(dim);
  for (auto& x : out.vec) x = init(rng);

  Matrix words = model.word_output_vectors;  // frozen; sgns_round won't touch it
  const double lr0 = model.params.learning_rate;
  const double lr_min = lr0 * 1e-4;
  std::uniform_int_distribution<std::size_t> pick(0, doc.size() - 1);
  for (std::size_t step = 0; step < steps; ++step) {
    double lr = lr0 - (lr0 - lr_min) * static_cast<double>(step) / static_cast<double>(steps);
    for (std::size_t pos = 0; pos < doc.size(); ++pos) {
      for (std::size_t w = 0; w < model.params.window; ++w) {
        std::size_t target = doc[pick(rng)];
        sgns_round(out.vec.data(), words, target, model.params.negative,
                   model.vocab.sampling_cdf, lr, dim, rng, false);
      }
    }
  }
  return out;
}

double cosine(const std::vector<double>& u, const std::vector<double>& v) {
  if (u.size() != v.size()) throw std::invalid_argument("cosine: dimension mismatch");
  double uu = 0.0, vv = 0.0, uv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uu += u[i] * u[i];
    vv += v[i] * v[i];
    uv += u[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) return 0.0;
  return uv / (std::sqrt(uu) * std::sqrt(vv));
}

}  // namespace ueba::d2v
