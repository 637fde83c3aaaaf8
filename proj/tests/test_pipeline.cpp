#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include <json.hpp>

#include "ueba/pipeline/commands.hpp"
#include "ueba/pipeline/config.hpp"
#include "ueba/pipeline/model_store.hpp"
#include "ueba/synth.hpp"

using namespace ueba;
using namespace ueba::pipeline;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ueba_pipe_test_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

/// Small-but-real pipeline configuration that trains in seconds.
PipelineConfig fast_config(std::uint64_t seed = 7) {
  auto cfg = default_config(feat::Role::CM);
  cfg.seed = seed;
  cfg.synth.num_users = 4;
  cfg.synth.num_days = 2;
  cfg.autoencoder.hidden = {16, 8, 16};
  cfg.autoencoder.latent_dim = 8;
  cfg.train.max_epochs = 5;
  cfg.train.patience = 2;
  cfg.doc2vec.epochs = 2;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

ModelBundle trained_bundle(const fs::path& work, std::uint64_t seed = 7) {
  auto cfg = fast_config(seed);
  cmd_synth(cfg, work / "data");
  cmd_featurize(work / "data" / "events.jsonl", cfg, work / "features.csv");
  cmd_train(work / "features.csv", cfg, work / "store");
  return load_model(work / "store");
}

}  // namespace

TEST_CASE("default_config: role-specific training hyperparameters") {
  auto cm = default_config(feat::Role::CM);
  CHECK(cm.train.learning_rate == doctest::Approx(1e-3));
  CHECK(cm.train.batch_size == 64);
  CHECK(cm.role == feat::Role::CM);
  auto ep = default_config(feat::Role::EP);
  CHECK(ep.train.learning_rate == doctest::Approx(1e-2));
  CHECK(ep.train.batch_size == 256);
  // shared defaults
  CHECK(cm.window_seconds == 3600);
  CHECK(cm.autoencoder.input_dim == 83);
  CHECK(cm.doc2vec.dim == 64);
  cm.validate();
  ep.validate();
}

TEST_CASE("config json: full round-trip and partial overrides") {
  TempDir tmp;
  auto cfg = fast_config(99);
  cfg.stress_fixed_z = true;
  auto file = tmp.path / "config.json";
  write_config_json(file, cfg);
  auto back = read_config_json(file);
  CHECK(back.role == cfg.role);
  CHECK(back.seed == 99);
  CHECK(back.autoencoder.hidden == cfg.autoencoder.hidden);
  CHECK(back.train.max_epochs == cfg.train.max_epochs);
  CHECK(back.doc2vec.epochs == 2);
  CHECK(back.stress_fixed_z);
  CHECK(back.synth.num_users == 4);

  // a sparse document overrides only what it names
  auto partial = config_from_json(R"({"role": "ep", "seed": 5, "train": {"batch_size": 32}})");
  CHECK(partial.role == feat::Role::EP);
  CHECK(partial.seed == 5);
  CHECK(partial.train.batch_size == 32);
  CHECK(partial.train.learning_rate == doctest::Approx(1e-2));  // EP default preserved
  CHECK(partial.autoencoder.input_dim == 83);
}

TEST_CASE("file_content_hash: FNV-1a 64 of known bytes") {
  TempDir tmp;
  auto file = tmp.path / "probe.bin";
  {
    std::ofstream f(file, std::ios::binary);
    f << "abc";
  }
  // FNV-1a 64 of "abc"
  CHECK(file_content_hash(file) == "e71fa2190541574b");
  std::ofstream(tmp.path / "empty.bin", std::ios::binary);
  CHECK(file_content_hash(tmp.path / "empty.bin") == "cbf29ce484222325");  // offset basis
}

TEST_CASE("pipeline end-to-end: synth -> featurize -> train -> score -> verify") {
  TempDir tmp;
  auto cfg = fast_config();
  cmd_synth(cfg, tmp.path / "data");
  CHECK(fs::exists(tmp.path / "data" / "events.jsonl"));
  CHECK(fs::exists(tmp.path / "data" / "profile.json"));

  cmd_featurize(tmp.path / "data" / "events.jsonl", cfg, tmp.path / "features.csv");
  auto records = feat::read_feature_csv(tmp.path / "features.csv");
  CHECK(records.size() >= 50);  // 4 users x 48 windowed hours, minus empty edges

  auto report = cmd_train(tmp.path / "features.csv", cfg, tmp.path / "store");
  CHECK(report.stopped_epoch >= 1);
  CHECK(report.threshold > 0.0);
  for (const char* name : {"manifest.json", "encoder.bin", "decoder.bin", "scaler.json",
                           "doc_vectors.bin", "word_vectors.bin", "vocab.txt"}) {
    INFO(name);
    CHECK(fs::exists(tmp.path / "store" / name));
  }

  cmd_verify(tmp.path / "store");

  cmd_score(tmp.path / "store", tmp.path / "features.csv", tmp.path / "scores.jsonl");
  std::ifstream f(tmp.path / "scores.jsonl");
  std::string line;
  std::size_t rows = 0, anomalies = 0;
  while (std::getline(f, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j.at("score").get<double>() >= 0.0);
    CHECK(j.at("threshold").get<double>() == doctest::Approx(report.threshold));
    CHECK(j.at("input").size() == 83);
    CHECK(j.at("reconstruction").size() == 83);
    CHECK(j.at("residual").size() == 83);
    std::string decision = j.at("decision").get<std::string>();
    CHECK((decision == "anomaly" || decision == "normal"));
    if (decision == "anomaly") ++anomalies;
    ++rows;
  }
  CHECK(rows == records.size());
  // the threshold was calibrated on a subset of these rows, so some but not
  // most should be flagged
  CHECK(anomalies > 0);
  CHECK(anomalies < rows / 2);

  // scoring the raw events gives the same windows as scoring the feature CSV
  cmd_score(tmp.path / "store", tmp.path / "data" / "events.jsonl", tmp.path / "scores2.jsonl");
  CHECK(slurp(tmp.path / "scores.jsonl") == slurp(tmp.path / "scores2.jsonl"));
}

TEST_CASE("model store: load round-trips every component") {
  TempDir tmp;
  auto bundle = trained_bundle(tmp.path);
  auto again = load_model(tmp.path / "store");
  CHECK(again.autoencoder.combined() == bundle.autoencoder.combined());
  CHECK(again.autoencoder.threshold == bundle.autoencoder.threshold);
  CHECK(again.autoencoder.role == "cm");
  CHECK(again.scaler.median == bundle.scaler.median);
  CHECK(again.doc2vec.word_output_vectors == bundle.doc2vec.word_output_vectors);
  CHECK(again.doc2vec.doc_vectors == bundle.doc2vec.doc_vectors);
  CHECK(again.doc2vec.vocab.index_to_token == bundle.doc2vec.vocab.index_to_token);
  CHECK(again.doc2vec.vocab.sampling_cdf == bundle.doc2vec.vocab.sampling_cdf);
  CHECK(again.config.seed == bundle.config.seed);

  // both copies score identically
  std::vector<double> probe(83, 0.3);
  CHECK(ae::score(again.autoencoder, probe).score ==
        ae::score(bundle.autoencoder, probe).score);
}

TEST_CASE("model store: tampering is detected") {
  TempDir tmp;
  trained_bundle(tmp.path);
  auto store = tmp.path / "store";
  cmd_verify(store);

  // flip one byte of the encoder weights
  {
    std::fstream f(store / "encoder.bin", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(16);
    char b = 0;
    f.read(&b, 1);
    f.seekp(16);
    b = static_cast<char>(b ^ 0xff);
    f.write(&b, 1);
  }
  CHECK_THROWS_WITH_AS(verify_store(store), doctest::Contains("encoder.bin"), std::runtime_error);
  CHECK_THROWS_AS(load_model(store), std::runtime_error);

  CHECK_THROWS_AS(load_model(tmp.path / "no_such_store"), std::runtime_error);
}

TEST_CASE("training is reproducible: same seed publishes byte-identical stores") {
  TempDir tmp;
  auto cfg = fast_config(11);
  cmd_synth(cfg, tmp.path / "data");
  cmd_featurize(tmp.path / "data" / "events.jsonl", cfg, tmp.path / "features.csv");
  cmd_train(tmp.path / "features.csv", cfg, tmp.path / "store_a");
  cmd_train(tmp.path / "features.csv", cfg, tmp.path / "store_b");
  for (const char* name : {"manifest.json", "encoder.bin", "decoder.bin", "scaler.json",
                           "doc_vectors.bin", "word_vectors.bin", "vocab.txt"}) {
    INFO(name);
    CHECK(file_content_hash(tmp.path / "store_a" / name) ==
          file_content_hash(tmp.path / "store_b" / name));
  }

  // a different seed changes the model
  auto cfg2 = fast_config(12);
  cmd_train(tmp.path / "features.csv", cfg2, tmp.path / "store_c");
  CHECK(file_content_hash(tmp.path / "store_a" / "encoder.bin") !=
        file_content_hash(tmp.path / "store_c" / "encoder.bin"));
}

TEST_CASE("embed_records: per-window seeds are stable across subsets") {
  TempDir tmp;
  auto bundle = trained_bundle(tmp.path, 3);
  auto records = feat::read_feature_csv(tmp.path / "features.csv");
  REQUIRE(records.size() >= 3);

  auto full = embed_records(records, bundle.doc2vec, bundle.autoencoder.seed);
  // embedding a subset reproduces the same rows: position does not matter
  std::vector<feat::FeatureRecord> subset = {records[2], records[0]};
  auto part = embed_records(subset, bundle.doc2vec, bundle.autoencoder.seed);
  CHECK(part.row_vec(0) == full.row_vec(2));
  CHECK(part.row_vec(1) == full.row_vec(0));

  // a different model seed changes the embeddings
  auto other = embed_records(records, bundle.doc2vec, bundle.autoencoder.seed + 1);
  CHECK_FALSE(other == full);
}

TEST_CASE("cmd_stress: labelled grid outputs with default templates") {
  TempDir tmp;
  trained_bundle(tmp.path, 5);
  cmd_stress(tmp.path / "store", tmp.path / "features.csv", std::nullopt, tmp.path / "stress");
  CHECK(fs::exists(tmp.path / "stress" / "templates.json"));
  CHECK(fs::exists(tmp.path / "stress" / "detection_curves.csv"));
  auto set = synth::read_test_set_csv(tmp.path / "stress" / "test_set.csv");
  CHECK(set.X.rows() == 1000);
  CHECK(set.X.cols() == 83);
  CHECK(set.labels.size() == 1000);

  // stress is deterministic for a given store
  cmd_stress(tmp.path / "store", tmp.path / "features.csv", std::nullopt, tmp.path / "stress2");
  CHECK(slurp(tmp.path / "stress" / "test_set.csv") ==
        slurp(tmp.path / "stress2" / "test_set.csv"));

  // an explicit template file is honoured
  cmd_stress(tmp.path / "store", tmp.path / "features.csv",
             tmp.path / "stress" / "templates.json", tmp.path / "stress3");
  CHECK(slurp(tmp.path / "stress" / "detection_curves.csv") ==
        slurp(tmp.path / "stress3" / "detection_curves.csv"));
}

TEST_CASE("cmd_train: role filtering rejects feature files without matching rows") {
  TempDir tmp;
  auto cfg = fast_config();
  cmd_synth(cfg, tmp.path / "data");
  cmd_featurize(tmp.path / "data" / "events.jsonl", cfg, tmp.path / "features.csv");
  auto ep_cfg = cfg;
  ep_cfg.role = feat::Role::EP;
  CHECK_THROWS_WITH_AS(cmd_train(tmp.path / "features.csv", ep_cfg, tmp.path / "store_ep"),
                       doctest::Contains("ep"), std::runtime_error);
}
