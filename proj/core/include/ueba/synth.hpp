#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ueba/events.hpp"
#include "ueba/features.hpp"
#include "ueba/matrix.hpp"

namespace ueba::synth {

/// Event-rate model for one business role. Rates are mean event counts per
/// one-hour window during peak hours; the hourly activity pattern scales them
/// across the day.
struct RoleProfile {
  feat::Role role = feat::Role::CM;
  std::map<feat::EventKind, double> rates;
  std::array<double, 24> hourly_activity{};  // multiplier per hour of day
  std::vector<std::pair<std::string, double>> process_vocab;  // token, weight
  double email_size_log_mean = 9.0;  // lognormal body+attachment size in bytes
  double email_size_log_sd = 1.0;
  double email_files_mean = 0.4;  // Poisson
  double email_links_mean = 1.2;  // Poisson
  std::size_t workstations_per_user = 2;

  void validate() const;
};

RoleProfile default_profile(feat::Role role);

void write_profile_json(const std::filesystem::path& path, const RoleProfile& profile);
RoleProfile read_profile_json(const std::filesystem::path& path);

/// Deterministic under seed; each user draws from an independent child stream.
std::vector<feat::RawEvent> generate_logs(const RoleProfile& profile, std::size_t num_users,
                                          std::size_t num_days, std::uint64_t seed);

/// Synthetic stand-in for an attack signature: a point in the scaled
/// 83-dimensional model-input space.
struct AnomalyTemplate {
  int id = 0;
  std::string type;  // login | antivirus | email | process
  std::vector<double> point;
};

/// Ten templates (4 login, 2 antivirus, 2 email, 2 process) placed beyond the
/// per-coordinate mean of the scaled normal data on their type's features.
std::vector<AnomalyTemplate> build_default_templates(const Matrix& scaled_normals);

void write_templates_json(const std::filesystem::path& path,
                          const std::vector<AnomalyTemplate>& templates);
std::vector<AnomalyTemplate> read_templates_json(const std::filesystem::path& path);

struct IntensityGrid {
  std::vector<double> lambdas;

  /// k/100 for k = 1..100.
  static IntensityGrid default_grid();
  void validate() const;
};

/// Coordinate-wise convex combination z (1 - lambda) + lambda a.
std::vector<double> interpolate(const std::vector<double>& z, const std::vector<double>& a,
                                double lambda);

struct TestSetLabel {
  int template_id = 0;
  std::string type;
  double lambda = 0.0;
};

struct LabelledTestSet {
  Matrix X;
  std::vector<TestSetLabel> labels;
};

/// One row per (template, lambda): a fresh normal row z is drawn for each
/// combination unless fixed_z_per_template is set, in which case one z is
/// drawn per template and reused across the grid.
LabelledTestSet build_test_set(const Matrix& normals,
                               const std::vector<AnomalyTemplate>& templates,
                               const IntensityGrid& grid, std::uint64_t seed,
                               bool fixed_z_per_template = false);

/// CSV: template_id,type,lambda followed by the 83 input columns.
void write_test_set_csv(const std::filesystem::path& path, const LabelledTestSet& set);
LabelledTestSet read_test_set_csv(const std::filesystem::path& path);

}  // namespace ueba::synth
