#include "ueba/pipeline/commands.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "ueba/eval/report.hpp"
#include "ueba/rng.hpp"
#include "ueba/synth.hpp"

namespace ueba::pipeline {

namespace {

synth::RoleProfile profile_for(const PipelineConfig& cfg) {
  if (cfg.synth.profile_path) return synth::read_profile_json(*cfg.synth.profile_path);
  return synth::default_profile(cfg.role);
}

std::map<std::string, feat::Role> role_map_for(const std::vector<feat::RawEvent>& events,
                                               feat::Role role) {
  std::map<std::string, feat::Role> m;
  for (const auto& ev : events) m[ev.user] = role;
  return m;
}

std::vector<feat::FeatureRecord> load_role_records(const std::filesystem::path& features_csv,
                                                   feat::Role role) {
  auto records = feat::read_feature_csv(features_csv);
  std::erase_if(records, [&](const feat::FeatureRecord& r) { return r.key.role != role; });
  if (records.empty())
    throw std::runtime_error("no feature rows for role " + to_string(role) + " in " +
                             features_csv.string());
  return records;
}

/// Features for one record, embedded and scaled with a stored model.
std::vector<double> scaled_input_for(const ModelBundle& bundle, const feat::FeatureRecord& rec) {
  std::uint64_t embed_parent = derive_seed(bundle.autoencoder.seed, "embed");
  std::uint64_t row_seed = derive_seed(
      embed_parent, rec.key.user + "@" + std::to_string(rec.key.window_start));
  auto x = feat::attach_embedding(rec, bundle.doc2vec, row_seed);
  return feat::apply_scaler(bundle.scaler, x);
}

}  // namespace

Matrix embed_records(const std::vector<feat::FeatureRecord>& records,
                     const d2v::Doc2VecModel& model, std::uint64_t model_seed) {
  Matrix X(records.size(), feat::kInputDim);
  std::uint64_t embed_parent = derive_seed(model_seed, "embed");
  for (std::size_t r = 0; r < records.size(); ++r) {
    std::uint64_t row_seed = derive_seed(
        embed_parent, records[r].key.user + "@" + std::to_string(records[r].key.window_start));
    X.set_row(r, feat::attach_embedding(records[r], model, row_seed));
  }
  return X;
}

void cmd_synth(const PipelineConfig& cfg, const std::filesystem::path& out_dir) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);
  auto profile = profile_for(cfg);
  auto events = synth::generate_logs(profile, cfg.synth.num_users, cfg.synth.num_days,
                                     derive_seed(cfg.seed, "synth"));
  feat::write_events_jsonl(out_dir / "events.jsonl", events);
  synth::write_profile_json(out_dir / "profile.json", profile);
}

void cmd_featurize(const std::filesystem::path& events_path, const PipelineConfig& cfg,
                   const std::filesystem::path& out_csv) {
  cfg.validate();
  auto events = feat::read_events_jsonl(events_path);
  feat::AggregateConfig agg;
  agg.window_seconds = cfg.window_seconds;
  auto records = feat::aggregate(events, agg, role_map_for(events, cfg.role));
  if (out_csv.has_parent_path()) std::filesystem::create_directories(out_csv.parent_path());
  feat::write_feature_csv(out_csv, records);
}

ae::TrainReport cmd_train(const std::filesystem::path& features_csv, const PipelineConfig& cfg,
                          const std::filesystem::path& store_dir) {
  cfg.validate();
  auto records = load_role_records(features_csv, cfg.role);

  std::vector<d2v::TokenSequence> corpus;
  corpus.reserve(records.size());
  for (const auto& r : records) corpus.push_back(r.process_list);
  d2v::Doc2VecParams d2v_params = cfg.doc2vec;
  d2v_params.seed = derive_seed(cfg.seed, "doc2vec");
  auto doc_model = d2v::train_dbow(corpus, d2v_params);

  auto X_raw = embed_records(records, doc_model, cfg.seed);
  auto scaler = feat::fit_scaler(X_raw);
  auto X = feat::apply_scaler(scaler, X_raw);

  auto model = ae::build(cfg.autoencoder, cfg.seed);
  model.role = to_string(cfg.role);
  ae::TrainConfig train_cfg = cfg.train;
  train_cfg.seed = derive_seed(cfg.seed, "train");
  auto report = ae::train(model, X, train_cfg);

  // Wall-clock metadata is opt-in via SOURCE_DATE_EPOCH so that identical runs
  // publish byte-identical manifests.
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"))
    model.trained_at = feat::format_iso8601_utc(std::atoll(epoch));

  ModelBundle bundle{std::move(model), std::move(scaler), std::move(doc_model), cfg};
  save_model(store_dir, bundle);
  return report;
}

void cmd_score(const std::filesystem::path& store_dir, const std::filesystem::path& input_path,
               const std::filesystem::path& out_jsonl) {
  auto bundle = load_model(store_dir);

  std::vector<feat::FeatureRecord> records;
  if (input_path.extension() == ".jsonl") {
    auto events = feat::read_events_jsonl(input_path);
    feat::AggregateConfig agg;
    agg.window_seconds = bundle.config.window_seconds;
    records = feat::aggregate(events, agg, role_map_for(events, bundle.config.role));
  } else {
    records = load_role_records(input_path, bundle.config.role);
  }

  if (out_jsonl.has_parent_path()) std::filesystem::create_directories(out_jsonl.parent_path());
  std::ofstream f(out_jsonl, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for write: " + out_jsonl.string());
  for (const auto& rec : records) {
    auto x = scaled_input_for(bundle, rec);
    auto rep = ae::score(bundle.autoencoder, x);
    nlohmann::json j;
    j["user"] = rec.key.user;
    j["window_start"] = feat::format_iso8601_utc(rec.key.window_start);
    j["score"] = rep.score;
    j["decision"] = rep.anomaly ? "anomaly" : "normal";
    j["threshold"] = bundle.autoencoder.threshold;
    j["input"] = rep.input;
    j["reconstruction"] = rep.reconstruction;
    j["residual"] = rep.residual;
    f << j.dump() << '\n';
  }
}

void cmd_stress(const std::filesystem::path& store_dir, const std::filesystem::path& features_csv,
                const std::optional<std::filesystem::path>& templates_json,
                const std::filesystem::path& out_dir) {
  auto bundle = load_model(store_dir);
  auto records = load_role_records(features_csv, bundle.config.role);
  auto X_raw = embed_records(records, bundle.doc2vec, bundle.autoencoder.seed);
  auto normals = feat::apply_scaler(bundle.scaler, X_raw);

  auto templates = templates_json ? synth::read_templates_json(*templates_json)
                                  : synth::build_default_templates(normals);
  auto grid = synth::IntensityGrid::default_grid();
  auto set = synth::build_test_set(normals, templates, grid,
                                   derive_seed(bundle.config.seed, "stress"),
                                   bundle.config.stress_fixed_z);

  std::filesystem::create_directories(out_dir);
  synth::write_templates_json(out_dir / "templates.json", templates);
  synth::write_test_set_csv(out_dir / "test_set.csv", set);

  auto curves = eval::detection_curve(bundle.autoencoder, set);
  std::ofstream f(out_dir / "detection_curves.csv", std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write detection curves");
  f << "type,lambda,rate,n\n";
  char buf[32];
  for (const auto& [type, curve] : curves)
    for (const auto& pt : curve) {
      std::snprintf(buf, sizeof(buf), "%.17g", pt.lambda);
      f << type << ',' << buf;
      std::snprintf(buf, sizeof(buf), "%.17g", pt.rate);
      f << ',' << buf << ',' << pt.count << '\n';
    }
}

void cmd_diagnose(const std::filesystem::path& store_dir, const std::filesystem::path& features_csv,
                  const std::filesystem::path& out_dir) {
  auto bundle = load_model(store_dir);
  auto records = load_role_records(features_csv, bundle.config.role);
  auto X_raw = embed_records(records, bundle.doc2vec, bundle.autoencoder.seed);
  auto X = feat::apply_scaler(bundle.scaler, X_raw);

  // A small stress set gives the report labelled points for the residual map.
  auto templates = synth::build_default_templates(X);
  auto set = synth::build_test_set(X, templates, synth::IntensityGrid::default_grid(),
                                   derive_seed(bundle.config.seed, "diagnose"),
                                   bundle.config.stress_fixed_z);

  eval::ReportInputs inputs;
  inputs.model = &bundle.autoencoder;
  inputs.stress_set = &set;
  inputs.clean_rows = &X;
  inputs.tsne_config = bundle.config.tsne;
  inputs.tsne_config.seed = derive_seed(bundle.config.seed, "diagnose-tsne");
  eval::write_report(inputs, out_dir);
}

void cmd_verify(const std::filesystem::path& store_dir) {
  verify_store(store_dir);
  auto bundle = load_model(store_dir);
  // Scoring self-check: a probe vector must satisfy the score/decision
  // invariants after a store round-trip.
  std::vector<double> probe(bundle.autoencoder.spec.input_dim, 0.5);
  auto rep = ae::score(bundle.autoencoder, probe);
  if (rep.score < 0.0) throw std::runtime_error("verify: negative score");
  double l1 = 0.0;
  for (double r : rep.residual) l1 += std::abs(r);
  if (std::abs(l1 - rep.score) > 1e-12)
    throw std::runtime_error("verify: score is not the residual L1 norm");
  if (rep.anomaly != (rep.score >= bundle.autoencoder.threshold))
    throw std::runtime_error("verify: decision rule mismatch");
}

}  // namespace ueba::pipeline
