#include "ueba/eval/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "ueba/features.hpp"

namespace ueba::eval {

DetectionCurveSet detection_curve(const ae::AutoencoderModel& model,
                                  const synth::LabelledTestSet& set) {
  if (set.labels.size() != set.X.rows())
    throw std::invalid_argument("detection_curve: label count != row count");

  // (type, lambda) -> (flagged, total), keyed in lambda order per type
  std::map<std::string, std::map<double, std::pair<std::size_t, std::size_t>>> acc;
  for (std::size_t r = 0; r < set.X.rows(); ++r) {
    const auto& label = set.labels[r];
    if (label.type.empty()) throw std::invalid_argument("detection_curve: missing type label");
    auto& cell = acc[label.type][label.lambda];
    if (ae::score(model, set.X.row_vec(r)).anomaly) ++cell.first;
    ++cell.second;
  }

  DetectionCurveSet out;
  for (const auto& [type, by_lambda] : acc) {
    auto& curve = out[type];
    for (const auto& [lambda, cell] : by_lambda)
      curve.push_back({lambda, static_cast<double>(cell.first) / static_cast<double>(cell.second),
                       cell.second});
  }
  return out;
}

FeatureErrorReport per_feature_error(const ae::AutoencoderModel& model, const Matrix& rows) {
  if (rows.rows() == 0) throw std::invalid_argument("per_feature_error: empty rows");
  const std::size_t d = model.spec.input_dim;
  if (rows.cols() != d) throw std::invalid_argument("per_feature_error: column mismatch");

  std::vector<double> mean_abs(d, 0.0);
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    auto rep = ae::score(model, rows.row_vec(r));
    for (std::size_t c = 0; c < d; ++c) mean_abs[c] += std::abs(rep.residual[c]);
  }
  for (auto& v : mean_abs) v /= static_cast<double>(rows.rows());

  FeatureErrorReport report;
  report.row_count = rows.rows();
  for (const auto& name : feat::input_column_names()) report.names.push_back(name);
  report.mean_abs_residual = mean_abs;

  // Aggregated embedding group, reported alongside the individual coordinates.
  if (d == feat::kInputDim) {
    double acc = 0.0;
    for (std::size_t c = feat::kNumericFeatureCount; c < feat::kInputDim; ++c) acc += mean_abs[c];
    report.names.push_back("process_embedding");
    report.mean_abs_residual.push_back(acc / static_cast<double>(feat::kEmbeddingDim));
  }

  for (double m : report.mean_abs_residual) report.log_mean.push_back(std::log(m + 1e-12));
  return report;
}

}  // namespace ueba::eval
