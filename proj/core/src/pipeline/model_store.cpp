#include "ueba/pipeline/model_store.hpp"

#include <cstdint>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "ueba/nn/serialize.hpp"

namespace ueba::pipeline {

namespace {

constexpr const char* kManifest = "manifest.json";
const std::vector<std::string> kBlobFiles = {"encoder.bin",     "decoder.bin",
                                             "scaler.json",     "doc_vectors.bin",
                                             "word_vectors.bin", "vocab.txt"};

void write_matrix_blob(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for write: " + path.string());
  f.write(reinterpret_cast<const char*>(m.data()),
          static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

Matrix read_matrix_blob(const std::filesystem::path& path, std::size_t rows, std::size_t cols) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path.string());
  Matrix m(rows, cols);
  f.read(reinterpret_cast<char*>(m.data()),
         static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (f.gcount() != static_cast<std::streamsize>(m.size() * sizeof(double)))
    throw std::runtime_error("matrix blob truncated: " + path.string());
  return m;
}

nlohmann::json layer_manifest_json(const std::vector<nn::LayerManifest>& layers) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& l : layers)
    arr.push_back({{"in", l.in_dim}, {"out", l.out_dim}, {"activations", l.activation_tags}});
  return arr;
}

std::vector<nn::LayerManifest> layer_manifest_from_json(const nlohmann::json& arr) {
  std::vector<nn::LayerManifest> out;
  for (const auto& e : arr) {
    nn::LayerManifest m;
    m.in_dim = e.at("in").get<std::size_t>();
    m.out_dim = e.at("out").get<std::size_t>();
    m.activation_tags = e.at("activations").get<std::vector<std::string>>();
    out.push_back(std::move(m));
  }
  return out;
}

void write_vocab(const std::filesystem::path& path, const d2v::Vocabulary& vocab) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for write: " + path.string());
  for (std::size_t i = 0; i < vocab.index_to_token.size(); ++i) {
    const auto& tok = vocab.index_to_token[i];
    f << tok << '\t' << vocab.tokens.at(tok).count << '\t' << i << '\n';
  }
}

d2v::Vocabulary read_vocab(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path.string());
  d2v::Vocabulary v;
  std::string line;
  double pow_total = 0.0;
  std::vector<std::uint64_t> counts;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto tab1 = line.find('\t');
    auto tab2 = line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos)
      throw std::runtime_error("bad vocab line: " + line);
    std::string tok = line.substr(0, tab1);
    std::uint64_t count = std::stoull(line.substr(tab1 + 1, tab2 - tab1 - 1));
    std::size_t index = std::stoull(line.substr(tab2 + 1));
    if (index != v.index_to_token.size())
      throw std::runtime_error("vocab indices not dense at: " + tok);
    v.tokens[tok] = {index, count};
    v.index_to_token.push_back(tok);
    v.total_count += count;
    counts.push_back(count);
    pow_total += std::pow(static_cast<double>(count), 0.75);
  }
  double acc = 0.0;
  for (auto c : counts) {
    acc += std::pow(static_cast<double>(c), 0.75) / pow_total;
    v.sampling_cdf.push_back(acc);
  }
  if (!v.sampling_cdf.empty()) v.sampling_cdf.back() = 1.0;
  return v;
}

}  // namespace

std::string file_content_hash(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for hashing: " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64 offset basis
  char buf[65536];
  while (f) {
    f.read(buf, sizeof(buf));
    for (std::streamsize i = 0; i < f.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

void save_model(const std::filesystem::path& store_dir, const ModelBundle& bundle) {
  namespace fs = std::filesystem;
  fs::path tmp = store_dir;
  tmp += ".tmp";
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  nn::write_weight_blob(tmp / "encoder.bin", bundle.autoencoder.encoder);
  nn::write_weight_blob(tmp / "decoder.bin", bundle.autoencoder.decoder);
  feat::write_scaler_json(tmp / "scaler.json", bundle.scaler);
  write_matrix_blob(tmp / "doc_vectors.bin", bundle.doc2vec.doc_vectors);
  write_matrix_blob(tmp / "word_vectors.bin", bundle.doc2vec.word_output_vectors);
  write_vocab(tmp / "vocab.txt", bundle.doc2vec.vocab);

  nlohmann::json m;
  m["format_version"] = 1;
  m["role"] = to_string(bundle.config.role);
  m["seed"] = bundle.autoencoder.seed;
  m["threshold"] = bundle.autoencoder.threshold;
  if (!bundle.autoencoder.trained_at.empty()) m["trained_at"] = bundle.autoencoder.trained_at;
  m["config"] = nlohmann::json::parse(config_to_json(bundle.config));
  m["autoencoder"] = {{"input_dim", bundle.autoencoder.spec.input_dim},
                      {"hidden", bundle.autoencoder.spec.hidden},
                      {"latent_dim", bundle.autoencoder.spec.latent_dim},
                      {"encoder_layers", layer_manifest_json(describe(bundle.autoencoder.encoder))},
                      {"decoder_layers", layer_manifest_json(describe(bundle.autoencoder.decoder))}};
  m["doc2vec"] = {{"dim", bundle.doc2vec.params.dim},
                  {"window", bundle.doc2vec.params.window},
                  {"epochs", bundle.doc2vec.params.epochs},
                  {"negative", bundle.doc2vec.params.negative},
                  {"learning_rate", bundle.doc2vec.params.learning_rate},
                  {"min_count", bundle.doc2vec.params.min_count},
                  {"seed", bundle.doc2vec.params.seed},
                  {"num_docs", bundle.doc2vec.doc_vectors.rows()},
                  {"vocab_size", bundle.doc2vec.word_output_vectors.rows()}};
  for (const auto& name : kBlobFiles) m["hashes"][name] = file_content_hash(tmp / name);

  {
    std::ofstream f(tmp / kManifest, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write manifest");
    f << m.dump(2) << '\n';
  }

  // publish atomically
  fs::remove_all(store_dir);
  fs::create_directories(store_dir.parent_path().empty() ? "." : store_dir.parent_path());
  fs::rename(tmp, store_dir);
}

ModelBundle load_model(const std::filesystem::path& store_dir) {
  verify_store(store_dir);
  std::ifstream f(store_dir / kManifest);
  nlohmann::json m = nlohmann::json::parse(f);

  ModelBundle b;
  b.config = config_from_json(m.at("config").dump());
  b.autoencoder.spec.input_dim = m["autoencoder"]["input_dim"].get<std::size_t>();
  b.autoencoder.spec.hidden = m["autoencoder"]["hidden"].get<std::vector<std::size_t>>();
  b.autoencoder.spec.latent_dim = m["autoencoder"]["latent_dim"].get<std::size_t>();
  b.autoencoder.encoder = nn::read_weight_blob(
      store_dir / "encoder.bin", layer_manifest_from_json(m["autoencoder"]["encoder_layers"]));
  b.autoencoder.decoder = nn::read_weight_blob(
      store_dir / "decoder.bin", layer_manifest_from_json(m["autoencoder"]["decoder_layers"]));
  b.autoencoder.threshold = m.at("threshold").get<double>();
  b.autoencoder.seed = m.at("seed").get<std::uint64_t>();
  b.autoencoder.role = m.at("role").get<std::string>();
  if (m.contains("trained_at")) b.autoencoder.trained_at = m["trained_at"].get<std::string>();

  b.scaler = feat::read_scaler_json(store_dir / "scaler.json");

  b.doc2vec.params.dim = m["doc2vec"]["dim"].get<std::size_t>();
  b.doc2vec.params.window = m["doc2vec"]["window"].get<std::size_t>();
  b.doc2vec.params.epochs = m["doc2vec"]["epochs"].get<std::size_t>();
  b.doc2vec.params.negative = m["doc2vec"]["negative"].get<std::size_t>();
  b.doc2vec.params.learning_rate = m["doc2vec"]["learning_rate"].get<double>();
  b.doc2vec.params.min_count = m["doc2vec"]["min_count"].get<std::uint64_t>();
  b.doc2vec.params.seed = m["doc2vec"]["seed"].get<std::uint64_t>();
  b.doc2vec.vocab = read_vocab(store_dir / "vocab.txt");
  std::size_t num_docs = m["doc2vec"]["num_docs"].get<std::size_t>();
  std::size_t vocab_size = m["doc2vec"]["vocab_size"].get<std::size_t>();
  if (vocab_size != b.doc2vec.vocab.size())
    throw std::runtime_error("model store: vocab size mismatch");
  b.doc2vec.doc_vectors =
      read_matrix_blob(store_dir / "doc_vectors.bin", num_docs, b.doc2vec.params.dim);
  b.doc2vec.word_output_vectors =
      read_matrix_blob(store_dir / "word_vectors.bin", vocab_size, b.doc2vec.params.dim);

  if (b.autoencoder.encoder.output_dim() != b.autoencoder.spec.latent_dim ||
      b.autoencoder.decoder.input_dim() != b.autoencoder.spec.latent_dim)
    throw std::runtime_error("model store: latent dimension mismatch");
  if (b.scaler.dim() != b.autoencoder.spec.input_dim)
    throw std::runtime_error("model store: scaler dimension mismatch");
  return b;
}

void verify_store(const std::filesystem::path& store_dir) {
  auto manifest_path = store_dir / kManifest;
  if (!std::filesystem::exists(manifest_path))
    throw std::runtime_error("model store missing manifest: " + manifest_path.string());
  std::ifstream f(manifest_path);
  nlohmann::json m = nlohmann::json::parse(f);

  if (!m.contains("hashes")) throw std::runtime_error("model store manifest lacks hashes");
  for (const auto& [name, expected] : m["hashes"].items()) {
    auto path = store_dir / name;
    if (!std::filesystem::exists(path))
      throw std::runtime_error("model store missing blob: " + path.string());
    auto actual = file_content_hash(path);
    if (actual != expected.get<std::string>())
      throw std::runtime_error("model store hash mismatch for " + name + ": expected " +
                               expected.get<std::string>() + ", got " + actual);
  }
  double tau = m.at("threshold").get<double>();
  if (!(tau >= 0.0) || !std::isfinite(tau))
    throw std::runtime_error("model store: threshold must be finite and >= 0");
}

}  // namespace ueba::pipeline
