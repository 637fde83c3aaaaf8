#include "ueba/pipeline/config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace ueba::pipeline {

void PipelineConfig::validate() const {
  if (window_seconds <= 0) throw std::invalid_argument("config: window_seconds must be > 0");
  autoencoder.validate();
  train.validate();
  doc2vec.validate();
}

PipelineConfig default_config(feat::Role role) {
  PipelineConfig cfg;
  cfg.role = role;
  if (role == feat::Role::CM) {
    cfg.train.learning_rate = 1e-3;
    cfg.train.batch_size = 64;
  } else {
    cfg.train.learning_rate = 1e-2;
    cfg.train.batch_size = 256;
  }
  return cfg;
}

std::string config_to_json(const PipelineConfig& cfg) {
  nlohmann::json j;
  j["role"] = to_string(cfg.role);
  j["seed"] = cfg.seed;
  j["window_seconds"] = cfg.window_seconds;
  j["autoencoder"] = {{"input_dim", cfg.autoencoder.input_dim},
                      {"hidden", cfg.autoencoder.hidden},
                      {"latent_dim", cfg.autoencoder.latent_dim}};
  j["train"] = {{"learning_rate", cfg.train.learning_rate},
                {"batch_size", cfg.train.batch_size},
                {"max_epochs", cfg.train.max_epochs},
                {"patience", cfg.train.patience},
                {"validation_fraction", cfg.train.validation_fraction},
                {"l1_lambda", cfg.train.l1_lambda}};
  j["doc2vec"] = {{"dim", cfg.doc2vec.dim},
                  {"window", cfg.doc2vec.window},
                  {"epochs", cfg.doc2vec.epochs},
                  {"negative", cfg.doc2vec.negative},
                  {"learning_rate", cfg.doc2vec.learning_rate},
                  {"min_count", cfg.doc2vec.min_count}};
  j["tsne"] = {{"perplexity", cfg.tsne.perplexity},
               {"iterations", cfg.tsne.iterations},
               {"early_exaggeration", cfg.tsne.early_exaggeration},
               {"exaggeration_iterations", cfg.tsne.exaggeration_iterations},
               {"learning_rate", cfg.tsne.learning_rate}};
  j["synth"] = {{"num_users", cfg.synth.num_users}, {"num_days", cfg.synth.num_days}};
  if (cfg.synth.profile_path) j["synth"]["profile_path"] = cfg.synth.profile_path->string();
  j["stress_fixed_z"] = cfg.stress_fixed_z;
  return j.dump(2);
}

PipelineConfig config_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  PipelineConfig cfg = default_config(
      j.contains("role") ? feat::role_from_string(j["role"].get<std::string>()) : feat::Role::CM);
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("window_seconds")) cfg.window_seconds = j["window_seconds"].get<std::int64_t>();
  if (j.contains("autoencoder")) {
    const auto& a = j["autoencoder"];
    if (a.contains("input_dim")) cfg.autoencoder.input_dim = a["input_dim"].get<std::size_t>();
    if (a.contains("hidden")) cfg.autoencoder.hidden = a["hidden"].get<std::vector<std::size_t>>();
    if (a.contains("latent_dim")) cfg.autoencoder.latent_dim = a["latent_dim"].get<std::size_t>();
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    if (t.contains("learning_rate")) cfg.train.learning_rate = t["learning_rate"].get<double>();
    if (t.contains("batch_size")) cfg.train.batch_size = t["batch_size"].get<std::size_t>();
    if (t.contains("max_epochs")) cfg.train.max_epochs = t["max_epochs"].get<std::size_t>();
    if (t.contains("patience")) cfg.train.patience = t["patience"].get<std::size_t>();
    if (t.contains("validation_fraction"))
      cfg.train.validation_fraction = t["validation_fraction"].get<double>();
    if (t.contains("l1_lambda")) cfg.train.l1_lambda = t["l1_lambda"].get<double>();
  }
  if (j.contains("doc2vec")) {
    const auto& d = j["doc2vec"];
    if (d.contains("dim")) cfg.doc2vec.dim = d["dim"].get<std::size_t>();
    if (d.contains("window")) cfg.doc2vec.window = d["window"].get<std::size_t>();
    if (d.contains("epochs")) cfg.doc2vec.epochs = d["epochs"].get<std::size_t>();
    if (d.contains("negative")) cfg.doc2vec.negative = d["negative"].get<std::size_t>();
    if (d.contains("learning_rate")) cfg.doc2vec.learning_rate = d["learning_rate"].get<double>();
    if (d.contains("min_count")) cfg.doc2vec.min_count = d["min_count"].get<std::uint64_t>();
  }
  if (j.contains("tsne")) {
    const auto& t = j["tsne"];
    if (t.contains("perplexity")) cfg.tsne.perplexity = t["perplexity"].get<double>();
    if (t.contains("iterations")) cfg.tsne.iterations = t["iterations"].get<std::size_t>();
    if (t.contains("early_exaggeration"))
      cfg.tsne.early_exaggeration = t["early_exaggeration"].get<double>();
    if (t.contains("exaggeration_iterations"))
      cfg.tsne.exaggeration_iterations = t["exaggeration_iterations"].get<std::size_t>();
    if (t.contains("learning_rate")) cfg.tsne.learning_rate = t["learning_rate"].get<double>();
  }
  if (j.contains("synth")) {
    const auto& s = j["synth"];
    if (s.contains("num_users")) cfg.synth.num_users = s["num_users"].get<std::size_t>();
    if (s.contains("num_days")) cfg.synth.num_days = s["num_days"].get<std::size_t>();
    if (s.contains("profile_path"))
      cfg.synth.profile_path = std::filesystem::path(s["profile_path"].get<std::string>());
  }
  if (j.contains("stress_fixed_z")) cfg.stress_fixed_z = j["stress_fixed_z"].get<bool>();
  cfg.validate();
  return cfg;
}

PipelineConfig read_config_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path.string());
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return config_from_json(text);
}

void write_config_json(const std::filesystem::path& path, const PipelineConfig& cfg) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for write: " + path.string());
  f << config_to_json(cfg) << '\n';
}

}  // namespace ueba::pipeline
