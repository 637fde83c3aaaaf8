#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "ueba/features.hpp"

namespace ueba::feat {

namespace {

constexpr double kIqrGuard = 1e-9;

/// Linear-interpolated quantile of a sorted sample (the usual "type 7" rule:
/// h = (n - 1) q).
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  double h = q * static_cast<double>(n - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, n - 1);
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

ScalerParams fit_scaler(const Matrix& X_train) {
  if (X_train.rows() < 2) throw std::invalid_argument("fit_scaler: need at least 2 rows");
  const std::size_t d = X_train.cols();
  ScalerParams p;
  p.median.resize(d);
  p.iqr.resize(d);
  p.min.resize(d);
  p.max.resize(d);

  std::vector<double> col(X_train.rows());
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t r = 0; r < X_train.rows(); ++r) {
      col[r] = X_train(r, c);
      if (!std::isfinite(col[r]))
        throw std::invalid_argument("fit_scaler: non-finite value in column " + std::to_string(c));
    }
    std::sort(col.begin(), col.end());
    p.median[c] = quantile_sorted(col, 0.5);
    p.iqr[c] = quantile_sorted(col, 0.75) - quantile_sorted(col, 0.25);
    double denom = std::max(p.iqr[c], kIqrGuard);
    double lo = (col.front() - p.median[c]) / denom;
    double hi = (col.back() - p.median[c]) / denom;
    p.min[c] = lo;
    p.max[c] = hi;
  }
  return p;
}

std::vector<double> apply_scaler(const ScalerParams& params, const std::vector<double>& x) {
  if (x.size() != params.dim()) throw std::invalid_argument("apply_scaler: dimension mismatch");
  std::vector<double> out(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) {
    double u = (x[c] - params.median[c]) / std::max(params.iqr[c], kIqrGuard);
    double range = params.max[c] - params.min[c];
    out[c] = range > 0.0 ? (u - params.min[c]) / range : 0.5;
  }
  return out;
}

Matrix apply_scaler(const ScalerParams& params, const Matrix& X) {
  Matrix out(X.rows(), X.cols());
  for (std::size_t r = 0; r < X.rows(); ++r) out.set_row(r, apply_scaler(params, X.row_vec(r)));
  return out;
}

std::vector<double> invert_scaler(const ScalerParams& params, const std::vector<double>& scaled) {
  if (scaled.size() != params.dim()) throw std::invalid_argument("invert_scaler: dimension mismatch");
  std::vector<double> out(scaled.size());
  for (std::size_t c = 0; c < scaled.size(); ++c) {
    double range = params.max[c] - params.min[c];
    double u = range > 0.0 ? scaled[c] * range + params.min[c] : 0.0;
    out[c] = u * std::max(params.iqr[c], kIqrGuard) + params.median[c];
  }
  return out;
}

void write_scaler_json(const std::filesystem::path& path, const ScalerParams& params) {
  nlohmann::json j;
  j["median"] = params.median;
  j["iqr"] = params.iqr;
  j["min"] = params.min;
  j["max"] = params.max;
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for write: " + path.string());
  f << j.dump(2) << '\n';
}

ScalerParams read_scaler_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path.string());
  nlohmann::json j = nlohmann::json::parse(f);
  ScalerParams p;
  p.median = j.at("median").get<std::vector<double>>();
  p.iqr = j.at("iqr").get<std::vector<double>>();
  p.min = j.at("min").get<std::vector<double>>();
  p.max = j.at("max").get<std::vector<double>>();
  if (p.iqr.size() != p.median.size() || p.min.size() != p.median.size() ||
      p.max.size() != p.median.size())
    throw std::runtime_error("scaler JSON: inconsistent array lengths");
  return p;
}

}  // namespace ueba::feat
