#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "ueba/doc2vec.hpp"

using namespace ueba;
using namespace ueba::d2v;

namespace {

/// Two clearly separated token communities: documents either talk about
/// "build" tools or about "mail" tools, with no shared vocabulary.
std::vector<TokenSequence> clustered_corpus(std::size_t per_cluster = 20) {
  std::vector<TokenSequence> corpus;
  const std::vector<std::string> build = {"gcc", "make", "ld", "cmake", "ninja"};
  const std::vector<std::string> mail = {"outlook", "smtp", "imap", "exchange", "thunderbird"};
  for (std::size_t i = 0; i < per_cluster; ++i) {
    TokenSequence a, b;
    for (std::size_t j = 0; j < 8; ++j) {
      a.push_back(build[(i + j) % build.size()]);
      b.push_back(mail[(i * 3 + j) % mail.size()]);
    }
    corpus.push_back(a);
    corpus.push_back(b);
  }
  return corpus;
}

}  // namespace

TEST_CASE("build_vocab: counts, ordering, and tie-breaks") {
  std::vector<TokenSequence> corpus = {{"b", "a", "b"}, {"c", "b", "a"}};
  auto v = build_vocab(corpus, 1);
  // counts: b=3, a=2, c=1 -> indices 0,1,2
  CHECK(v.size() == 3);
  CHECK(v.index_to_token == std::vector<std::string>{"b", "a", "c"});
  CHECK(v.tokens.at("b").count == 3);
  CHECK(v.index_of("a") == 1);
  CHECK(v.index_of("missing") == -1);
  CHECK(v.total_count == 6);

  // equal counts break ties lexicographically
  auto tied = build_vocab({{"z", "m", "a"}}, 1);
  CHECK(tied.index_to_token == std::vector<std::string>{"a", "m", "z"});
}

TEST_CASE("build_vocab: min_count filtering and error cases") {
  std::vector<TokenSequence> corpus = {{"a", "a", "b"}};
  auto v = build_vocab(corpus, 2);
  CHECK(v.size() == 1);
  CHECK(v.index_of("b") == -1);

  CHECK_THROWS_AS(build_vocab({}, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_vocab({{"a"}}, 5), std::invalid_argument);
  CHECK_THROWS_AS(build_vocab({{""}}, 1), std::invalid_argument);
}

TEST_CASE("build_vocab: sampling CDF is the normalized unigram^0.75 cumulative") {
  std::vector<TokenSequence> corpus = {{"a", "a", "a", "a", "b"}};
  auto v = build_vocab(corpus, 1);
  double pa = std::pow(4.0, 0.75), pb = std::pow(1.0, 0.75);
  CHECK(v.sampling_cdf.size() == 2);
  CHECK(v.sampling_cdf[0] == doctest::Approx(pa / (pa + pb)).epsilon(1e-12));
  CHECK(v.sampling_cdf[1] == 1.0);
  // monotone non-decreasing
  for (std::size_t i = 1; i < v.sampling_cdf.size(); ++i)
    CHECK(v.sampling_cdf[i] >= v.sampling_cdf[i - 1]);
}

TEST_CASE("train_dbow: shapes, determinism, and loss trend") {
  auto corpus = clustered_corpus(10);
  Doc2VecParams p;
  p.dim = 16;
  p.epochs = 10;
  p.seed = 5;
  auto a = train_dbow(corpus, p);
  CHECK(a.doc_vectors.rows() == corpus.size());
  CHECK(a.doc_vectors.cols() == 16);
  CHECK(a.word_output_vectors.rows() == a.vocab.size());
  CHECK(a.epoch_loss.size() == 10);
  // training should reduce the mean negative-sampling loss overall
  CHECK(a.epoch_loss.back() < a.epoch_loss.front());

  auto b = train_dbow(corpus, p);
  CHECK(a.doc_vectors == b.doc_vectors);
  CHECK(a.word_output_vectors == b.word_output_vectors);

  p.seed = 6;
  auto c = train_dbow(corpus, p);
  CHECK_FALSE(a.doc_vectors == c.doc_vectors);
}

TEST_CASE("train_dbow: empty documents are skipped and counted") {
  std::vector<TokenSequence> corpus = {{"a", "b"}, {}, {"a"}};
  Doc2VecParams p;
  p.dim = 4;
  p.epochs = 2;
  auto m = train_dbow(corpus, p);
  CHECK(m.skipped_empty_docs == 1);
  // the empty doc keeps its (random-initialized) row; no NaNs anywhere
  for (std::size_t i = 0; i < m.doc_vectors.size(); ++i)
    CHECK(std::isfinite(m.doc_vectors.data()[i]));
}

TEST_CASE("train_dbow: same-community documents embed closer than cross-community") {
  auto corpus = clustered_corpus(15);  // even indices: build, odd: mail
  Doc2VecParams p;
  p.dim = 16;
  p.epochs = 40;
  p.seed = 11;
  auto m = train_dbow(corpus, p);

  double same = cosine(m.doc_vectors.row_vec(0), m.doc_vectors.row_vec(2));
  double cross = cosine(m.doc_vectors.row_vec(0), m.doc_vectors.row_vec(1));
  CHECK(same > cross);
}

TEST_CASE("infer_vector: deterministic, seed-sensitive, and community-aware") {
  auto corpus = clustered_corpus(15);
  Doc2VecParams p;
  p.dim = 16;
  p.epochs = 40;
  p.seed = 11;
  auto m = train_dbow(corpus, p);

  TokenSequence build_doc = {"gcc", "make", "cmake", "ld"};
  TokenSequence mail_doc = {"smtp", "imap", "outlook", "exchange"};
  auto i1 = infer_vector(m, build_doc, 50, 7);
  auto i2 = infer_vector(m, build_doc, 50, 7);
  CHECK(i1.vec == i2.vec);
  CHECK_FALSE(i1.degenerate);
  auto i3 = infer_vector(m, build_doc, 50, 8);
  CHECK_FALSE(i1.vec == i3.vec);

  // inferred vectors reflect the same community structure as training
  auto im = infer_vector(m, mail_doc, 50, 7);
  auto i_build2 = infer_vector(m, {"ninja", "cmake", "gcc"}, 50, 9);
  CHECK(cosine(i1.vec, i_build2.vec) > cosine(i1.vec, im.vec));
}

TEST_CASE("infer_vector: word vectors stay frozen during inference") {
  auto corpus = clustered_corpus(5);
  Doc2VecParams p;
  p.dim = 8;
  p.epochs = 3;
  auto m = train_dbow(corpus, p);
  auto words_before = m.word_output_vectors;
  (void)infer_vector(m, {"gcc", "make"}, 50, 1);
  CHECK(m.word_output_vectors == words_before);
}

TEST_CASE("infer_vector: all-OOV input yields zero vector and degenerate flag") {
  auto m = train_dbow({{"a", "b"}, {"b", "c"}}, Doc2VecParams{.dim = 8, .epochs = 2});
  auto r = infer_vector(m, {"nope", "nothing"}, 50, 1);
  CHECK(r.degenerate);
  CHECK(r.vec == std::vector<double>(8, 0.0));
  // partial OOV is fine
  auto r2 = infer_vector(m, {"nope", "a"}, 50, 1);
  CHECK_FALSE(r2.degenerate);
}

TEST_CASE("params validation") {
  Doc2VecParams p;
  p.dim = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.learning_rate = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("cosine: alignment, opposition, and zero handling") {
  CHECK(cosine({1.0, 0.0}, {2.0, 0.0}) == doctest::Approx(1.0));
  CHECK(cosine({1.0, 0.0}, {-3.0, 0.0}) == doctest::Approx(-1.0));
  CHECK(cosine({1.0, 0.0}, {0.0, 5.0}) == doctest::Approx(0.0));
  CHECK(cosine({0.0, 0.0}, {1.0, 1.0}) == 0.0);
  CHECK_THROWS_AS(cosine({1.0}, {1.0, 2.0}), std::invalid_argument);
}
