#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ueba/pipeline/commands.hpp"

namespace {

using ueba::pipeline::PipelineConfig;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string role = "cm";
};

PipelineConfig resolve_config(const CommonOptions& opts) {
  PipelineConfig cfg;
  if (!opts.config_path.empty())
    cfg = ueba::pipeline::read_config_json(opts.config_path);
  else
    cfg = ueba::pipeline::default_config(ueba::feat::role_from_string(opts.role));
  if (opts.config_path.empty()) cfg.role = ueba::feat::role_from_string(opts.role);

  if (opts.seed)
    cfg.seed = *opts.seed;
  else if (const char* env = std::getenv("UEBA_SEED"))
    cfg.seed = std::strtoull(env, nullptr, 10);
  return cfg;
}

std::string resolve_store(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("UEBA_STORE")) return env;
  throw std::runtime_error("no model store given (use --store or UEBA_STORE)");
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "pipeline config JSON");
  cmd->add_option("--seed", opts.seed, "global seed (overrides config and UEBA_SEED)");
  cmd->add_option("--role", opts.role, "role: cm or ep")->check(CLI::IsMember({"cm", "ep"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Role-based behavioural anomaly detection over windowed log events"};
  app.require_subcommand(1);

  CommonOptions synth_opts, feat_opts, train_opts, score_opts, stress_opts, diag_opts;
  std::string out, store, events, features, input, templates;

  auto* synth = app.add_subcommand("synth", "generate synthetic event logs");
  add_common(synth, synth_opts);
  synth->add_option("--out", out, "output directory")->required();

  auto* featurize = app.add_subcommand("featurize", "aggregate events into windowed features");
  add_common(featurize, feat_opts);
  featurize->add_option("--events", events, "input events JSONL")->required();
  featurize->add_option("--out", out, "output feature CSV")->required();

  auto* train = app.add_subcommand("train", "train embeddings, autoencoder, and threshold");
  add_common(train, train_opts);
  train->add_option("--features", features, "input feature CSV")->required();
  train->add_option("--store", store, "model store directory");

  auto* score = app.add_subcommand("score", "score events or features against a stored model");
  score->add_option("--store", store, "model store directory");
  score->add_option("--input", input, "events .jsonl or feature CSV")->required();
  score->add_option("--out", out, "output score JSONL")->required();

  auto* stress = app.add_subcommand("stress", "convex-interpolation anomaly stress test");
  stress->add_option("--store", store, "model store directory");
  stress->add_option("--features", features, "clean feature CSV")->required();
  stress->add_option("--templates", templates, "anomaly templates JSON (defaults derived)");
  stress->add_option("--out", out, "output directory")->required();

  auto* diagnose = app.add_subcommand("diagnose", "embedding and residual diagnostics");
  diagnose->add_option("--store", store, "model store directory");
  diagnose->add_option("--features", features, "feature CSV")->required();
  diagnose->add_option("--out", out, "output directory")->required();

  auto* verify = app.add_subcommand("verify", "model store integrity checks");
  verify->add_option("--store", store, "model store directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      ueba::pipeline::cmd_synth(resolve_config(synth_opts), out);
    } else if (featurize->parsed()) {
      ueba::pipeline::cmd_featurize(events, resolve_config(feat_opts), out);
    } else if (train->parsed()) {
      auto report = ueba::pipeline::cmd_train(features, resolve_config(train_opts),
                                              resolve_store(store));
      std::cout << "trained: epochs=" << report.stopped_epoch << " best_epoch=" << report.best_epoch
                << " best_val_mse=" << report.best_validation_mse
                << " threshold=" << report.threshold << '\n';
    } else if (score->parsed()) {
      ueba::pipeline::cmd_score(resolve_store(store), input, out);
    } else if (stress->parsed()) {
      std::optional<std::filesystem::path> tpl;
      if (!templates.empty()) tpl = templates;
      ueba::pipeline::cmd_stress(resolve_store(store), features, tpl, out);
    } else if (diagnose->parsed()) {
      ueba::pipeline::cmd_diagnose(resolve_store(store), features, out);
    } else if (verify->parsed()) {
      ueba::pipeline::cmd_verify(resolve_store(store));
      std::cout << "store ok\n";
    }
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", e.what()}};
    std::cerr << err.dump() << '\n';
    return 1;
  }
  return 0;
}
