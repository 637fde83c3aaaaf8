#pragma once

#include <map>
#include <string>
#include <vector>

#include "ueba/autoencoder.hpp"
#include "ueba/matrix.hpp"
#include "ueba/synth.hpp"

namespace ueba::eval {

struct DetectionPoint {
  double lambda = 0.0;
  double rate = 0.0;
  std::size_t count = 0;
};

/// Per anomaly type: detection rate at each intensity value.
using DetectionCurveSet = std::map<std::string, std::vector<DetectionPoint>>;

DetectionCurveSet detection_curve(const ae::AutoencoderModel& model,
                                  const synth::LabelledTestSet& set);

struct FeatureErrorReport {
  std::vector<std::string> names;       // 19 numerics, e0..e63, process_embedding
  std::vector<double> mean_abs_residual;
  std::vector<double> log_mean;         // ln(mean + 1e-12)
  std::size_t row_count = 0;
};

/// Mean |residual| per coordinate over the rows, plus an aggregated
/// "process_embedding" entry averaging the 64 embedding coordinates.
FeatureErrorReport per_feature_error(const ae::AutoencoderModel& model, const Matrix& rows);

}  // namespace ueba::eval
