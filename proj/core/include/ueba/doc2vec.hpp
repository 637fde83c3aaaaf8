#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ueba/matrix.hpp"

namespace ueba::d2v {

using TokenSequence = std::vector<std::string>;

struct Vocabulary {
  struct Entry {
    std::size_t index = 0;
    std::uint64_t count = 0;
  };
  std::unordered_map<std::string, Entry> tokens;
  std::vector<std::string> index_to_token;  // dense, by index
  std::uint64_t total_count = 0;
  /// Cumulative negative-sampling distribution (unigram^0.75, normalized),
  /// indexed by token index; last entry is 1.
  std::vector<double> sampling_cdf;

  std::size_t size() const { return index_to_token.size(); }
  /// -1 if the token is absent (below min_count or never seen).
  long long index_of(const std::string& token) const;
};

struct Doc2VecParams {
  std::size_t dim = 64;
  std::size_t window = 5;
  std::size_t epochs = 20;
  std::size_t negative = 5;
  double learning_rate = 0.025;
  std::uint64_t min_count = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Doc2VecModel {
  Doc2VecParams params;
  Vocabulary vocab;
  Matrix doc_vectors;          // num_train_docs x dim
  Matrix word_output_vectors;  // V x dim
  std::vector<double> epoch_loss;  // mean negative-sampling loss per epoch
  std::size_t skipped_empty_docs = 0;
};

struct InferResult {
  std::vector<double> vec;
  bool degenerate = false;  // every token was out-of-vocabulary
};

/// Index order: descending count, ties broken by lexicographic token order.
Vocabulary build_vocab(const std::vector<TokenSequence>& corpus, std::uint64_t min_count);

/// DBOW with negative sampling: the document vector predicts words sampled
/// from the document. Per anchor position, up to `window` target words are
/// drawn uniformly from the document. Learning rate decays linearly to 1e-4
/// of its initial value.
Doc2VecModel train_dbow(const std::vector<TokenSequence>& corpus, const Doc2VecParams& params);

/// Fresh seeded doc vector updated for `steps` passes with word vectors
/// frozen. All-OOV input yields the zero vector with the degenerate flag set.
InferResult infer_vector(const Doc2VecModel& model, const TokenSequence& tokens,
                         std::size_t steps = 50, std::uint64_t seed = 1);

/// Zero input (either side) maps to 0.
double cosine(const std::vector<double>& u, const std::vector<double>& v);

}  // namespace ueba::d2v
