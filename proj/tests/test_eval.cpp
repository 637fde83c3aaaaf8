#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <unistd.h>

#include "ueba/eval/metrics.hpp"
#include "ueba/eval/report.hpp"
#include "ueba/eval/tsne.hpp"
#include "ueba/features.hpp"
#include "ueba/rng.hpp"

using namespace ueba;
using namespace ueba::eval;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ueba_eval_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

/// Autoencoder whose reconstruction is identically zero: the score of a row is
/// its L1 norm and the residual equals the input.
ae::AutoencoderModel zero_model(std::size_t input_dim = feat::kInputDim) {
  ae::AutoencoderSpec spec;
  spec.input_dim = input_dim;
  spec.hidden = {4, 2, 4};
  spec.latent_dim = 2;
  auto model = ae::build(spec, 0);
  for (auto* net : {&model.encoder, &model.decoder})
    for (auto& layer : net->layers) {
      std::fill(layer.affine.weights.data(),
                layer.affine.weights.data() + layer.affine.weights.size(), 0.0);
      std::fill(layer.affine.bias.begin(), layer.affine.bias.end(), 0.0);
    }
  return model;
}

/// Three well-separated Gaussian blobs in 5 dimensions.
Matrix three_blobs(std::size_t per_cluster, std::uint64_t seed, std::vector<int>* labels = nullptr) {
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  Matrix X(per_cluster * 3, 5);
  const double centers[3][5] = {{0, 0, 0, 0, 0}, {10, 10, 0, 0, 0}, {0, 0, 10, 10, 10}};
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < per_cluster; ++i) {
      std::size_t r = k * per_cluster + i;
      for (std::size_t c = 0; c < 5; ++c) X(r, c) = centers[k][c] + noise(rng);
      if (labels) labels->push_back(static_cast<int>(k));
    }
  return X;
}

}  // namespace

TEST_CASE("conditional_probabilities: matches the Gaussian-kernel formula") {
  // d2 relative to point 0: three neighbours at squared distances 1, 4, 9.
  std::vector<double> d2 = {0.0, 1.0, 4.0, 9.0};
  double beta = 0.5;
  std::vector<double> p;
  double h = 0.0;
  conditional_probabilities(d2, 0, beta, p, &h);

  double w1 = std::exp(-0.5 * 1.0), w2 = std::exp(-0.5 * 4.0), w3 = std::exp(-0.5 * 9.0);
  double sum = w1 + w2 + w3;
  CHECK(p[0] == 0.0);
  CHECK(p[1] == doctest::Approx(w1 / sum).epsilon(1e-12));
  CHECK(p[2] == doctest::Approx(w2 / sum).epsilon(1e-12));
  CHECK(p[3] == doctest::Approx(w3 / sum).epsilon(1e-12));
  CHECK(p[1] + p[2] + p[3] == doctest::Approx(1.0).epsilon(1e-12));

  // Shannon entropy of the distribution, computed directly
  double h_direct = 0.0;
  for (double q : {p[1], p[2], p[3]}) h_direct -= q * std::log(q);
  CHECK(h == doctest::Approx(h_direct).epsilon(1e-10));
}

TEST_CASE("conditional_probabilities: larger beta concentrates the distribution") {
  std::vector<double> d2 = {0.0, 1.0, 2.0, 5.0};
  std::vector<double> p_soft, p_sharp;
  double h_soft = 0.0, h_sharp = 0.0;
  conditional_probabilities(d2, 0, 0.1, p_soft, &h_soft);
  conditional_probabilities(d2, 0, 10.0, p_sharp, &h_sharp);
  CHECK(h_sharp < h_soft);
  CHECK(p_sharp[1] > p_soft[1]);  // nearest neighbour dominates
}

TEST_CASE("tsne: config validation and input checks") {
  TsneConfig cfg;
  cfg.perplexity = 30.0;
  CHECK_THROWS_WITH_AS(tsne(three_blobs(5, 1), cfg), doctest::Contains("3*perplexity"),
                       std::invalid_argument);
  cfg.perplexity = 0.0;
  CHECK_THROWS_AS(cfg.validate(100), std::invalid_argument);
  cfg = {};
  cfg.output_dim = 0;
  CHECK_THROWS_AS(cfg.validate(200), std::invalid_argument);

  Matrix bad = three_blobs(20, 1);
  bad(0, 0) = std::numeric_limits<double>::infinity();
  TsneConfig small;
  small.perplexity = 5.0;
  small.iterations = 10;
  CHECK_THROWS_AS(tsne(bad, small), std::invalid_argument);
}

TEST_CASE("tsne: KL drops and clusters separate on three blobs") {
  std::vector<int> labels;
  auto X = three_blobs(20, 7, &labels);
  TsneConfig cfg;
  cfg.perplexity = 10.0;
  cfg.iterations = 400;
  cfg.exaggeration_iterations = 100;
  cfg.seed = 7;
  auto emb = tsne(X, cfg);
  REQUIRE(emb.points.rows() == X.rows());
  CHECK(emb.points.cols() == 2);
  CHECK(emb.kl_trace.size() == 400);
  CHECK(emb.final_kl == emb.kl_trace.back());
  CHECK(emb.final_kl < emb.kl_trace.front());
  CHECK(emb.final_kl >= 0.0);

  // 1-NN purity in the embedding
  std::size_t pure = 0;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    double best = 1e300;
    std::size_t best_j = i;
    for (std::size_t j = 0; j < X.rows(); ++j) {
      if (i == j) continue;
      double dx = emb.points(i, 0) - emb.points(j, 0);
      double dy = emb.points(i, 1) - emb.points(j, 1);
      double d = dx * dx + dy * dy;
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    if (labels[i] == labels[best_j]) ++pure;
  }
  CHECK(static_cast<double>(pure) / static_cast<double>(X.rows()) >= 0.9);
}

TEST_CASE("tsne: deterministic under the seed") {
  auto X = three_blobs(10, 3);
  TsneConfig cfg;
  cfg.perplexity = 5.0;
  cfg.iterations = 50;
  cfg.seed = 9;
  auto a = tsne(X, cfg);
  auto b = tsne(X, cfg);
  CHECK(a.points == b.points);
  CHECK(a.kl_trace == b.kl_trace);
  cfg.seed = 10;
  CHECK_FALSE(tsne(X, cfg).points == a.points);
}

TEST_CASE("detection_curve: rates aggregate per type and lambda") {
  auto model = zero_model(3);
  model.threshold = 1.0;  // flag rows whose L1 norm reaches 1

  synth::LabelledTestSet set;
  set.X = Matrix(6, 3);
  // login, lambda 0.2: scores 0.5 (miss) and 1.5 (hit)
  set.X(0, 0) = 0.5;
  set.X(1, 0) = 1.5;
  // login, lambda 0.8: scores 2 and 3 (both hit)
  set.X(2, 1) = 2.0;
  set.X(3, 2) = 3.0;
  // email, lambda 0.2: 0.1 (miss); email lambda 1.0: exactly 1.0 (boundary hit)
  set.X(4, 0) = 0.1;
  set.X(5, 0) = 1.0;
  set.labels = {{1, "login", 0.2}, {2, "login", 0.2}, {1, "login", 0.8},
                {2, "login", 0.8}, {7, "email", 0.2}, {7, "email", 1.0}};

  auto curves = detection_curve(model, set);
  REQUIRE(curves.count("login") == 1);
  REQUIRE(curves.count("email") == 1);
  const auto& login = curves["login"];
  REQUIRE(login.size() == 2);
  CHECK(login[0].lambda == 0.2);
  CHECK(login[0].rate == doctest::Approx(0.5));
  CHECK(login[0].count == 2);
  CHECK(login[1].lambda == 0.8);
  CHECK(login[1].rate == 1.0);
  const auto& email = curves["email"];
  CHECK(email[0].rate == 0.0);
  CHECK(email[1].rate == 1.0);  // score == threshold counts as detected

  set.labels[0].type = "";
  CHECK_THROWS_AS(detection_curve(model, set), std::invalid_argument);
}

TEST_CASE("per_feature_error: residual means with aggregated embedding group") {
  auto model = zero_model();  // residual == input
  Matrix rows(2, feat::kInputDim);
  rows(0, 0) = 2.0;   // num_new_process
  rows(1, 0) = -4.0;
  rows(0, 19) = 1.0;  // e0
  rows(1, 19) = 3.0;
  auto rep = per_feature_error(model, rows);
  REQUIRE(rep.names.size() == feat::kInputDim + 1);
  CHECK(rep.names.front() == "num_new_process");
  CHECK(rep.names[19] == "e0");
  CHECK(rep.names.back() == "process_embedding");
  CHECK(rep.row_count == 2);
  CHECK(rep.mean_abs_residual[0] == doctest::Approx(3.0));
  CHECK(rep.mean_abs_residual[19] == doctest::Approx(2.0));
  // only e0 is nonzero among the 64 embedding coordinates
  CHECK(rep.mean_abs_residual.back() == doctest::Approx(2.0 / 64.0));
  CHECK(rep.log_mean[0] == doctest::Approx(std::log(3.0 + 1e-12)));

  CHECK_THROWS_AS(per_feature_error(model, Matrix(0, feat::kInputDim)), std::invalid_argument);
  CHECK_THROWS_AS(per_feature_error(model, Matrix(2, 5)), std::invalid_argument);
}

TEST_CASE("write_report: emits the full diagnostic bundle") {
  TempDir tmp;
  auto model = zero_model();
  model.threshold = 10.0;

  // small stress set with all four types represented
  Rng rng(6);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  synth::LabelledTestSet set;
  set.X = Matrix(40, feat::kInputDim);
  for (std::size_t i = 0; i < set.X.size(); ++i) set.X.data()[i] = d(rng);
  const std::string types[4] = {"login", "antivirus", "email", "process"};
  for (std::size_t r = 0; r < 40; ++r)
    set.labels.push_back({int(r % 4) + 1, types[r % 4], double(r % 10) / 10.0});

  Matrix clean(30, feat::kInputDim);
  for (std::size_t i = 0; i < clean.size(); ++i) clean.data()[i] = d(rng);

  ReportInputs inputs;
  inputs.model = &model;
  inputs.stress_set = &set;
  inputs.clean_rows = &clean;
  inputs.tsne_config.perplexity = 5.0;
  inputs.tsne_config.iterations = 30;
  inputs.tsne_config.exaggeration_iterations = 10;
  auto out = tmp.path / "report";
  write_report(inputs, out);

  for (const char* name : {"detection_curves.csv", "detection_curves.svg", "feature_errors.csv",
                           "feature_errors.svg", "tsne_residuals.csv", "tsne_residuals.svg",
                           "positive_rate.csv"}) {
    INFO(name);
    CHECK(fs::exists(out / name));
    CHECK(fs::file_size(out / name) > 0);
  }

  // SVGs are well-formed enough to open and close
  std::ifstream svg(out / "detection_curves.svg");
  std::string content((std::istreambuf_iterator<char>(svg)), std::istreambuf_iterator<char>());
  CHECK(content.find("<svg") != std::string::npos);
  CHECK(content.find("</svg>") != std::string::npos);
  CHECK(content.find("polyline") != std::string::npos);

  // positive_rate.csv carries the threshold and a rate in [0,1]
  std::ifstream pr(out / "positive_rate.csv");
  std::string header, row;
  std::getline(pr, header);
  std::getline(pr, row);
  CHECK(header == "n,positive_rate,threshold");
  CHECK(row.find("30,") == 0);

  CHECK_THROWS_AS(write_report(ReportInputs{}, out), std::invalid_argument);
}
