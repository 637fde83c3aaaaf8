#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ueba/doc2vec.hpp"
#include "ueba/events.hpp"
#include "ueba/matrix.hpp"

namespace ueba::feat {

enum class Role { CM, EP };
std::string to_string(Role r);
Role role_from_string(const std::string& s);

inline constexpr std::size_t kNumericFeatureCount = 19;
inline constexpr std::size_t kEmbeddingDim = 64;
inline constexpr std::size_t kInputDim = kNumericFeatureCount + kEmbeddingDim;

/// Order of the 19 engineered numeric features; also the CSV column order.
const std::array<std::string, kNumericFeatureCount>& numeric_feature_names();

struct WindowKey {
  std::string user;
  Role role = Role::CM;
  std::int64_t window_start = 0;  // aligned to the duration grid
  std::int64_t duration = 3600;   // seconds
};

struct FeatureRecord {
  WindowKey key;
  std::array<double, kNumericFeatureCount> numeric{};
  d2v::TokenSequence process_list;
};

struct AggregateConfig {
  std::int64_t window_seconds = 3600;
  bool fail_on_unmapped_user = false;  // otherwise skip silently
};

/// One record per (user, window) with at least one event, plus explicit empty
/// windows inside each user's first-to-last activity span. Counts are zero for
/// absent activity; the two timing averages fall back to the window duration
/// when fewer than two events exist.
std::vector<FeatureRecord> aggregate(std::vector<RawEvent> events, const AggregateConfig& cfg,
                                     const std::map<std::string, Role>& role_map);

/// [19 numerics || 64-dim embedding]. Empty or all-OOV process lists yield a
/// zero embedding; degenerate_out (optional) is set in that case.
std::vector<double> attach_embedding(const FeatureRecord& record, const d2v::Doc2VecModel& model,
                                     std::uint64_t infer_seed = 1, bool* degenerate_out = nullptr);

/// Robust scaling (median/IQR) followed by min-max over the robust values.
struct ScalerParams {
  std::vector<double> median;
  std::vector<double> iqr;
  std::vector<double> min;  // of the robust-scaled training values
  std::vector<double> max;

  std::size_t dim() const { return median.size(); }
};

ScalerParams fit_scaler(const Matrix& X_train);

/// u = (x - median) / max(iqr, 1e-9); out = (u - min) / (max - min), or 0.5
/// when the coordinate was constant in training. Values are not clamped.
std::vector<double> apply_scaler(const ScalerParams& params, const std::vector<double>& x);
Matrix apply_scaler(const ScalerParams& params, const Matrix& X);

/// Inverse of apply_scaler on non-degenerate coordinates.
std::vector<double> invert_scaler(const ScalerParams& params, const std::vector<double>& scaled);

// --- file formats ---

/// Feature CSV: user,role,window_start,duration,<19 numerics>,process_list
/// (process_list is a space-joined quoted field).
void write_feature_csv(const std::filesystem::path& path, const std::vector<FeatureRecord>& records);
std::vector<FeatureRecord> read_feature_csv(const std::filesystem::path& path);

/// 83-column numeric matrix CSV: 19 named numerics then e0..e63.
std::vector<std::string> input_column_names();
void write_matrix_csv(const std::filesystem::path& path, const Matrix& X,
                      const std::vector<std::string>& columns);
Matrix read_matrix_csv(const std::filesystem::path& path, std::vector<std::string>* columns = nullptr);

void write_scaler_json(const std::filesystem::path& path, const ScalerParams& params);
ScalerParams read_scaler_json(const std::filesystem::path& path);

}  // namespace ueba::feat
