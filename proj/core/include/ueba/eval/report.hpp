#pragma once

#include <filesystem>
#include <optional>

#include "ueba/eval/metrics.hpp"
#include "ueba/eval/tsne.hpp"

namespace ueba::eval {

struct ReportInputs {
  const ae::AutoencoderModel* model = nullptr;
  const synth::LabelledTestSet* stress_set = nullptr;  // optional
  const Matrix* clean_rows = nullptr;                  // optional, scaled
  TsneConfig tsne_config;
  std::size_t tsne_max_rows = 500;  // subsample cap for the O(n^2) embedding
};

/// Writes the evaluation bundle into out_dir:
///   detection_curves.csv / detection_curves.svg
///   feature_errors.csv / feature_errors.svg
///   tsne_residuals.csv / tsne_residuals.svg (when a stress set is given)
///   positive_rate.csv (when clean rows are given)
void write_report(const ReportInputs& inputs, const std::filesystem::path& out_dir);

}  // namespace ueba::eval
