#include "ueba/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "ueba/rng.hpp"

namespace ueba::synth {

namespace {

const std::vector<feat::EventKind>& all_kinds() {
  static const std::vector<feat::EventKind> kinds = {
      feat::EventKind::ProcessStart,   feat::EventKind::LoginOk,
      feat::EventKind::LoginFail,      feat::EventKind::AntivirusAlert,
      feat::EventKind::FirewallAlert,  feat::EventKind::EmailSent,
      feat::EventKind::EmailReceived,  feat::EventKind::EmailIncident,
      feat::EventKind::Ps4100,         feat::EventKind::Ps4104};
  return kinds;
}

}  // namespace

void RoleProfile::validate() const {
  for (const auto& [kind, rate] : rates)
    if (rate < 0.0) throw std::invalid_argument("RoleProfile: negative rate for " + to_string(kind));
  if (process_vocab.empty()) throw std::invalid_argument("RoleProfile: empty process vocabulary");
  for (const auto& [tok, w] : process_vocab)
    if (tok.empty() || w <= 0.0) throw std::invalid_argument("RoleProfile: bad vocabulary entry");
  if (email_size_log_sd <= 0.0) throw std::invalid_argument("RoleProfile: email_size_log_sd <= 0");
  if (email_files_mean < 0.0 || email_links_mean < 0.0)
    throw std::invalid_argument("RoleProfile: negative email payload mean");
  if (workstations_per_user == 0)
    throw std::invalid_argument("RoleProfile: workstations_per_user == 0");
}

RoleProfile default_profile(feat::Role role) {
  RoleProfile p;
  p.role = role;
  // Office-hours activity with a quiet but nonzero tail overnight.
  for (int h = 0; h < 24; ++h) {
    if (h >= 9 && h < 17)
      p.hourly_activity[h] = 1.0;
    else if (h >= 7 && h < 21)
      p.hourly_activity[h] = 0.35;
    else
      p.hourly_activity[h] = 0.08;
  }

  auto add_vocab = [&](const std::string& path, double w) { p.process_vocab.emplace_back(path, w); };
  const char* common[] = {
      "c:/windows/system32/svchost.exe",  "c:/windows/explorer.exe",
      "c:/program files/office/outlook.exe", "c:/program files/office/word.exe",
      "c:/program files/office/excel.exe", "c:/program files/browser/chrome.exe",
      "c:/windows/system32/cmd.exe",      "c:/windows/system32/taskmgr.exe",
      "c:/program files/teams/teams.exe", "c:/windows/system32/notepad.exe",
      "c:/program files/adobe/reader.exe", "c:/windows/system32/mmc.exe",
      "c:/program files/7zip/7z.exe",     "c:/windows/system32/wmiprvse.exe",
      "c:/program files/vpn/client.exe"};
  double w = 40.0;
  for (const char* path : common) {
    add_vocab(path, w);
    w = std::max(1.0, w * 0.78);
  }

  if (role == feat::Role::CM) {
    p.rates = {{feat::EventKind::ProcessStart, 6.0}, {feat::EventKind::LoginOk, 2.0},
               {feat::EventKind::LoginFail, 0.25},   {feat::EventKind::AntivirusAlert, 0.04},
               {feat::EventKind::FirewallAlert, 0.07}, {feat::EventKind::EmailSent, 2.5},
               {feat::EventKind::EmailReceived, 4.0}, {feat::EventKind::EmailIncident, 0.02},
               {feat::EventKind::Ps4100, 0.05},      {feat::EventKind::Ps4104, 0.1}};
    add_vocab("c:/program files/crm/crmclient.exe", 25.0);
    add_vocab("c:/program files/crm/ticketing.exe", 12.0);
    add_vocab("c:/program files/callcenter/softphone.exe", 18.0);
  } else {
    p.rates = {{feat::EventKind::ProcessStart, 4.0}, {feat::EventKind::LoginOk, 1.2},
               {feat::EventKind::LoginFail, 0.15},   {feat::EventKind::AntivirusAlert, 0.03},
               {feat::EventKind::FirewallAlert, 0.05}, {feat::EventKind::EmailSent, 4.0},
               {feat::EventKind::EmailReceived, 7.0}, {feat::EventKind::EmailIncident, 0.03},
               {feat::EventKind::Ps4100, 0.02},      {feat::EventKind::Ps4104, 0.05}};
    p.email_size_log_mean = 9.6;
    add_vocab("c:/program files/bi/dashboard.exe", 20.0);
    add_vocab("c:/program files/finance/terminal.exe", 15.0);
    add_vocab("c:/program files/office/powerpoint.exe", 22.0);
  }
  return p;
}

void write_profile_json(const std::filesystem::path& path, const RoleProfile& profile) {
  nlohmann::json j;
  j["role"] = to_string(profile.role);
  for (const auto& [kind, rate] : profile.rates) j["rates"][to_string(kind)] = rate;
  j["hourly_activity"] = profile.hourly_activity;
  for (const auto& [tok, w] : profile.process_vocab)
    j["process_vocab"].push_back({{"token", tok}, {"weight", w}});
  j["email_size_log_mean"] = profile.email_size_log_mean;
  j["email_size_log_sd"] = profile.email_size_log_sd;
  j["email_files_mean"] = profile.email_files_mean;
  j["email_links_mean"] = profile.email_links_mean;
  j["workstations_per_user"] = profile.workstations_per_user;
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for write: " + path.string());
  f << j.dump(2) << '\n';
}

RoleProfile read_profile_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path.string());
  nlohmann::json j = nlohmann::json::parse(f);
  RoleProfile p;
  p.role = feat::role_from_string(j.at("role").get<std::string>());
  for (const auto& [key, val] : j.at("rates").items())
    p.rates[feat::event_kind_from_string(key)] = val.get<double>();
  auto hours = j.at("hourly_activity").get<std::vector<double>>();
  if (hours.size() != 24) throw std::runtime_error("profile: hourly_activity must have 24 entries");
  std::copy(hours.begin(), hours.end(), p.hourly_activity.begin());
  for (const auto& entry : j.at("process_vocab"))
    p.process_vocab.emplace_back(entry.at("token").get<std::string>(),
                                 entry.at("weight").get<double>());
  p.email_size_log_mean = j.at("email_size_log_mean").get<double>();
  p.email_size_log_sd = j.at("email_size_log_sd").get<double>();
  p.email_files_mean = j.at("email_files_mean").get<double>();
  p.email_links_mean = j.at("email_links_mean").get<double>();
  p.workstations_per_user = j.at("workstations_per_user").get<std::size_t>();
  p.validate();
  return p;
}

std::vector<feat::RawEvent> generate_logs(const RoleProfile& profile, std::size_t num_users,
                                          std::size_t num_days, std::uint64_t seed) {
  profile.validate();
  if (num_users == 0 || num_days == 0)
    throw std::invalid_argument("generate_logs: sizes must be positive");

  std::vector<double> vocab_weights;
  for (const auto& [tok, w] : profile.process_vocab) vocab_weights.push_back(w);

  std::vector<feat::RawEvent> events;
  const std::string role_tag = to_string(profile.role);
  for (std::size_t u = 0; u < num_users; ++u) {
    const std::string user = role_tag + "_user" + std::to_string(u);
    Rng rng(derive_seed(seed, "loggen-" + user));
    std::discrete_distribution<std::size_t> pick_proc(vocab_weights.begin(), vocab_weights.end());
    std::uniform_int_distribution<std::size_t> pick_ws(0, profile.workstations_per_user - 1);

    for (std::size_t day = 0; day < num_days; ++day) {
      for (int hour = 0; hour < 24; ++hour) {
        const double activity = profile.hourly_activity[hour];
        const std::int64_t window_start =
            static_cast<std::int64_t>(day) * 86400 + static_cast<std::int64_t>(hour) * 3600;
        for (auto kind : all_kinds()) {
          auto it = profile.rates.find(kind);
          double rate = (it == profile.rates.end() ? 0.0 : it->second) * activity;
          if (rate <= 0.0) continue;
          std::poisson_distribution<int> pois(rate);
          int count = pois(rng);
          for (int k = 0; k < count; ++k) {
            feat::RawEvent ev;
            std::uniform_int_distribution<std::int64_t> in_window(0, 3599);
            ev.time = window_start + in_window(rng);
            ev.user = user;
            ev.workstation = user + "-ws" + std::to_string(pick_ws(rng));
            ev.kind = kind;
            if (kind == feat::EventKind::ProcessStart)
              ev.process = profile.process_vocab[pick_proc(rng)].first;
            if (kind == feat::EventKind::EmailSent || kind == feat::EventKind::EmailReceived) {
              std::lognormal_distribution<double> size(profile.email_size_log_mean,
                                                      profile.email_size_log_sd);
              std::poisson_distribution<int> files(profile.email_files_mean);
              std::poisson_distribution<int> links(profile.email_links_mean);
              ev.email_size = static_cast<std::int64_t>(size(rng));
              ev.email_files = files(rng);
              ev.email_links = links(rng);
            }
            events.push_back(std::move(ev));
          }
        }
      }
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const feat::RawEvent& a, const feat::RawEvent& b) { return a.time < b.time; });
  return events;
}

namespace {

struct ColumnStats {
  std::vector<double> mean;
  std::vector<double> sd;
};

ColumnStats column_stats(const Matrix& X) {
  ColumnStats s;
  s.mean.assign(X.cols(), 0.0);
  s.sd.assign(X.cols(), 0.0);
  for (std::size_t r = 0; r < X.rows(); ++r)
    for (std::size_t c = 0; c < X.cols(); ++c) s.mean[c] += X(r, c);
  for (auto& m : s.mean) m /= static_cast<double>(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r)
    for (std::size_t c = 0; c < X.cols(); ++c) {
      double d = X(r, c) - s.mean[c];
      s.sd[c] += d * d;
    }
  for (auto& v : s.sd) v = std::sqrt(v / static_cast<double>(X.rows()));
  return s;
}

/// Boosted coordinate: several training standard deviations past the mean,
/// with a floor so the point clearly leaves the [0,1] training range.
double boosted(const ColumnStats& s, std::size_t c, double sigmas, double floor_offset) {
  return s.mean[c] + std::max(sigmas * s.sd[c], floor_offset);
}

}  // namespace

std::vector<AnomalyTemplate> build_default_templates(const Matrix& scaled_normals) {
  if (scaled_normals.rows() < 2 || scaled_normals.cols() != feat::kInputDim)
    throw std::invalid_argument("build_default_templates: need scaled 83-wide normal data");
  ColumnStats stats = column_stats(scaled_normals);

  auto base = [&]() { return stats.mean; };
  std::vector<AnomalyTemplate> out;

  // Feature indices, matching numeric_feature_names() order.
  constexpr std::size_t kNumLogins = 1, kAvgSecBetLogins = 2, kNumFLogins = 3,
                        kAvgSecBetFLogins = 4, kNumAv = 5, kNumFw = 6, kSentEmails = 7,
                        kSentSize = 10, kSentFiles = 12, kSentLinks = 14;

  // Login anomalies: brute-force / credential-stuffing style signatures.
  {
    AnomalyTemplate t{1, "login", base()};
    t.point[kNumFLogins] = boosted(stats, kNumFLogins, 16.0, 20.0);
    t.point[kNumLogins] = boosted(stats, kNumLogins, 12.0, 12.0);
    out.push_back(std::move(t));
  }
  {
    AnomalyTemplate t{2, "login", base()};
    t.point[kNumFLogins] = boosted(stats, kNumFLogins, 20.0, 28.0);
    t.point[kAvgSecBetFLogins] = boosted(stats, kAvgSecBetFLogins, 12.0, 12.0);
    out.push_back(std::move(t));
  }
  {
    AnomalyTemplate t{3, "login", base()};
    t.point[kNumLogins] = boosted(stats, kNumLogins, 16.0, 20.0);
    t.point[kAvgSecBetLogins] = boosted(stats, kAvgSecBetLogins, 12.0, 12.0);
    out.push_back(std::move(t));
  }
  {
    AnomalyTemplate t{4, "login", base()};
    t.point[kNumFLogins] = boosted(stats, kNumFLogins, 16.0, 18.0);
    t.point[kNumLogins] = boosted(stats, kNumLogins, 10.0, 10.0);
    t.point[kAvgSecBetLogins] = boosted(stats, kAvgSecBetLogins, 8.0, 8.0);
    out.push_back(std::move(t));
  }
  // Antivirus incidents.
  {
    AnomalyTemplate t{5, "antivirus", base()};
    t.point[kNumAv] = boosted(stats, kNumAv, 18.0, 24.0);
    t.point[kNumFw] = boosted(stats, kNumFw, 10.0, 10.0);
    out.push_back(std::move(t));
  }
  {
    AnomalyTemplate t{6, "antivirus", base()};
    t.point[kNumAv] = boosted(stats, kNumAv, 14.0, 16.0);
    t.point[kNumFw] = boosted(stats, kNumFw, 14.0, 16.0);
    out.push_back(std::move(t));
  }
  // Email exfiltration.
  {
    AnomalyTemplate t{7, "email", base()};
    t.point[kSentSize] = boosted(stats, kSentSize, 10.0, 14.0);
    t.point[kSentEmails] = boosted(stats, kSentEmails, 5.0, 5.0);
    t.point[kSentFiles] = boosted(stats, kSentFiles, 6.0, 6.0);
    out.push_back(std::move(t));
  }
  {
    AnomalyTemplate t{8, "email", base()};
    t.point[kSentLinks] = boosted(stats, kSentLinks, 10.0, 12.0);
    t.point[kSentEmails] = boosted(stats, kSentEmails, 6.0, 6.0);
    t.point[kSentSize] = boosted(stats, kSentSize, 5.0, 5.0);
    out.push_back(std::move(t));
  }
  // Process anomalies: the embedding is pushed away from the role centroid.
  for (int id = 9; id <= 10; ++id) {
    AnomalyTemplate t{id, "process", base()};
    for (std::size_t c = feat::kNumericFeatureCount; c < feat::kInputDim; ++c) {
      double dir = ((c + static_cast<std::size_t>(id)) % 2 == 0) ? 1.0 : -1.0;
      t.point[c] = stats.mean[c] + dir * std::max(5.0 * stats.sd[c], 1.5);
    }
    out.push_back(std::move(t));
  }
  return out;
}

void write_templates_json(const std::filesystem::path& path,
                          const std::vector<AnomalyTemplate>& templates) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& t : templates)
    j.push_back({{"id", t.id}, {"type", t.type}, {"point", t.point}});
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for write: " + path.string());
  f << j.dump(2) << '\n';
}

std::vector<AnomalyTemplate> read_templates_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path.string());
  nlohmann::json j = nlohmann::json::parse(f);
  std::vector<AnomalyTemplate> out;
  for (const auto& entry : j) {
    AnomalyTemplate t;
    t.id = entry.at("id").get<int>();
    t.type = entry.at("type").get<std::string>();
    t.point = entry.at("point").get<std::vector<double>>();
    out.push_back(std::move(t));
  }
  return out;
}

IntensityGrid IntensityGrid::default_grid() {
  IntensityGrid g;
  for (int k = 1; k <= 100; ++k) g.lambdas.push_back(static_cast<double>(k) / 100.0);
  return g;
}

void IntensityGrid::validate() const {
  if (lambdas.empty()) throw std::invalid_argument("IntensityGrid: empty");
  double prev = -1.0;
  for (double l : lambdas) {
    if (l < 0.0 || l > 1.0) throw std::invalid_argument("IntensityGrid: lambda outside [0,1]");
    if (l <= prev) throw std::invalid_argument("IntensityGrid: lambdas must strictly increase");
    prev = l;
  }
}

std::vector<double> interpolate(const std::vector<double>& z, const std::vector<double>& a,
                                double lambda) {
  if (z.size() != a.size()) throw std::invalid_argument("interpolate: dimension mismatch");
  if (lambda < 0.0 || lambda > 1.0)
    throw std::invalid_argument("interpolate: lambda outside [0,1]");
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] * (1.0 - lambda) + lambda * a[i];
  return out;
}

LabelledTestSet build_test_set(const Matrix& normals,
                               const std::vector<AnomalyTemplate>& templates,
                               const IntensityGrid& grid, std::uint64_t seed,
                               bool fixed_z_per_template) {
  if (normals.rows() == 0) throw std::invalid_argument("build_test_set: empty normals");
  grid.validate();
  for (const auto& t : templates)
    if (t.point.size() != normals.cols())
      throw std::invalid_argument("build_test_set: template dimension mismatch");

  LabelledTestSet set;
  set.X = Matrix(templates.size() * grid.lambdas.size(), normals.cols());
  Rng rng(derive_seed(seed, "stress-sampling"));
  std::uniform_int_distribution<std::size_t> pick(0, normals.rows() - 1);

  std::size_t row = 0;
  for (const auto& t : templates) {
    std::vector<double> fixed_z;
    if (fixed_z_per_template) fixed_z = normals.row_vec(pick(rng));
    for (double lambda : grid.lambdas) {
      std::vector<double> z = fixed_z_per_template ? fixed_z : normals.row_vec(pick(rng));
      set.X.set_row(row, interpolate(z, t.point, lambda));
      set.labels.push_back({t.id, t.type, lambda});
      ++row;
    }
  }
  return set;
}

void write_test_set_csv(const std::filesystem::path& path, const LabelledTestSet& set) {
  std::vector<std::string> cols = {"template_id", "type", "lambda"};
  auto input_cols = feat::input_column_names();
  cols.insert(cols.end(), input_cols.begin(), input_cols.end());

  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for write: " + path.string());
  for (std::size_t c = 0; c < cols.size(); ++c) f << (c ? "," : "") << cols[c];
  f << '\n';
  char buf[32];
  for (std::size_t r = 0; r < set.X.rows(); ++r) {
    const auto& label = set.labels[r];
    std::snprintf(buf, sizeof(buf), "%.17g", label.lambda);
    f << label.template_id << ',' << label.type << ',' << buf;
    for (std::size_t c = 0; c < set.X.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", set.X(r, c));
      f << ',' << buf;
    }
    f << '\n';
  }
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

LabelledTestSet read_test_set_csv(const std::filesystem::path& path) {
  std::vector<std::string> cols;
  Matrix all;
  // Reuse the matrix reader for shape checking, but the first columns are not
  // numeric, so parse by hand.
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path.string());
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("empty test set CSV: " + path.string());

  LabelledTestSet set;
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t width = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    TestSetLabel label;
    std::getline(ss, field, ',');
    label.template_id = std::stoi(field);
    std::getline(ss, label.type, ',');
    std::getline(ss, field, ',');
    label.lambda = std::stod(field);
    set.labels.push_back(std::move(label));
    std::size_t n = 0;
    while (std::getline(ss, field, ',')) {
      values.push_back(std::stod(field));
      ++n;
    }
    if (width == 0) width = n;
    if (n != width) throw std::runtime_error(path.string() + ": ragged test set row");
    ++rows;
  }
  set.X = Matrix(rows, width);
  std::copy(values.begin(), values.end(), set.X.data());
  return set;
}

}  // namespace ueba::synth
