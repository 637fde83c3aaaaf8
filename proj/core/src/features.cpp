#include "ueba/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ueba::feat {

std::string to_string(Role r) { return r == Role::CM ? "cm" : "ep"; }

Role role_from_string(const std::string& s) {
  if (s == "cm" || s == "CM") return Role::CM;
  if (s == "ep" || s == "EP") return Role::EP;
  throw std::invalid_argument("unknown role: " + s);
}

const std::array<std::string, kNumericFeatureCount>& numeric_feature_names() {
  static const std::array<std::string, kNumericFeatureCount> names = {
      "num_new_process",      "num_logins",           "avg_sec_bet_logins",
      "num_f_logins",         "avg_sec_bet_f_logins", "num_antivirus_alerts",
      "num_firewall_alerts",  "sent_emails",          "received_emails",
      "incident_emails",      "sent_emails_size",     "received_emails_size",
      "sent_email_files",     "received_email_files", "sent_email_links",
      "received_email_links", "events_4100",          "events_4104",
      "workstation_count"};
  return names;
}

namespace {

enum FeatIdx : std::size_t {
  kNumNewProcess = 0,
  kNumLogins,
  kAvgSecBetLogins,
  kNumFLogins,
  kAvgSecBetFLogins,
  kNumAntivirusAlerts,
  kNumFirewallAlerts,
  kSentEmails,
  kReceivedEmails,
  kIncidentEmails,
  kSentEmailsSize,
  kReceivedEmailsSize,
  kSentEmailFiles,
  kReceivedEmailFiles,
  kSentEmailLinks,
  kReceivedEmailLinks,
  kEvents4100,
  kEvents4104,
  kWorkstationCount,
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double mean_gap(const std::vector<std::int64_t>& times, double fallback) {
  if (times.size() < 2) return fallback;
  double acc = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i)
    acc += static_cast<double>(times[i] - times[i - 1]);
  return acc / static_cast<double>(times.size() - 1);
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<FeatureRecord> aggregate(std::vector<RawEvent> events, const AggregateConfig& cfg,
                                     const std::map<std::string, Role>& role_map) {
  if (cfg.window_seconds <= 0) throw std::invalid_argument("aggregate: window duration must be > 0");
  std::stable_sort(events.begin(), events.end(),
                   [](const RawEvent& a, const RawEvent& b) { return a.time < b.time; });

  // (user, window index) -> events, in time order
  std::map<std::pair<std::string, std::int64_t>, std::vector<const RawEvent*>> buckets;
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> span;  // user -> [first, last] window
  for (const auto& ev : events) {
    auto role_it = role_map.find(ev.user);
    if (role_it == role_map.end()) {
      if (cfg.fail_on_unmapped_user)
        throw std::runtime_error("aggregate: user not in role map: " + ev.user);
      continue;
    }
    std::int64_t w = ev.time >= 0 ? ev.time / cfg.window_seconds
                                  : (ev.time - cfg.window_seconds + 1) / cfg.window_seconds;
    buckets[{ev.user, w}].push_back(&ev);
    auto [it, inserted] = span.try_emplace(ev.user, w, w);
    if (!inserted) {
      it->second.first = std::min(it->second.first, w);
      it->second.second = std::max(it->second.second, w);
    }
  }

  std::vector<FeatureRecord> out;
  const double duration = static_cast<double>(cfg.window_seconds);
  for (const auto& [user, window_span] : span) {
    for (std::int64_t w = window_span.first; w <= window_span.second; ++w) {
      FeatureRecord rec;
      rec.key.user = user;
      rec.key.role = role_map.at(user);
      rec.key.window_start = w * cfg.window_seconds;
      rec.key.duration = cfg.window_seconds;

      std::vector<std::int64_t> login_times, flogin_times;
      std::set<std::string> workstations;
      auto it = buckets.find({user, w});
      if (it != buckets.end()) {
        for (const RawEvent* ev : it->second) {
          workstations.insert(ev->workstation);
          switch (ev->kind) {
            case EventKind::ProcessStart:
              rec.numeric[kNumNewProcess] += 1;
              rec.process_list.push_back(lower(ev->process));
              break;
            case EventKind::LoginOk:
              rec.numeric[kNumLogins] += 1;
              login_times.push_back(ev->time);
              break;
            case EventKind::LoginFail:
              rec.numeric[kNumFLogins] += 1;
              flogin_times.push_back(ev->time);
              break;
            case EventKind::AntivirusAlert: rec.numeric[kNumAntivirusAlerts] += 1; break;
            case EventKind::FirewallAlert: rec.numeric[kNumFirewallAlerts] += 1; break;
            case EventKind::EmailSent:
              rec.numeric[kSentEmails] += 1;
              rec.numeric[kSentEmailsSize] += static_cast<double>(ev->email_size);
              rec.numeric[kSentEmailFiles] += static_cast<double>(ev->email_files);
              rec.numeric[kSentEmailLinks] += static_cast<double>(ev->email_links);
              break;
            case EventKind::EmailReceived:
              rec.numeric[kReceivedEmails] += 1;
              rec.numeric[kReceivedEmailsSize] += static_cast<double>(ev->email_size);
              rec.numeric[kReceivedEmailFiles] += static_cast<double>(ev->email_files);
              rec.numeric[kReceivedEmailLinks] += static_cast<double>(ev->email_links);
              break;
            case EventKind::EmailIncident: rec.numeric[kIncidentEmails] += 1; break;
            case EventKind::Ps4100: rec.numeric[kEvents4100] += 1; break;
            case EventKind::Ps4104: rec.numeric[kEvents4104] += 1; break;
          }
        }
      }
      rec.numeric[kAvgSecBetLogins] = mean_gap(login_times, duration);
      rec.numeric[kAvgSecBetFLogins] = mean_gap(flogin_times, duration);
      rec.numeric[kWorkstationCount] = static_cast<double>(workstations.size());
      out.push_back(std::move(rec));
    }
  }
  return out;
}

std::vector<double> attach_embedding(const FeatureRecord& record, const d2v::Doc2VecModel& model,
                                     std::uint64_t infer_seed, bool* degenerate_out) {
  std::vector<double> x(kInputDim, 0.0);
  for (std::size_t i = 0; i < kNumericFeatureCount; ++i) x[i] = record.numeric[i];
  bool degenerate = record.process_list.empty();
  if (!degenerate) {
    auto inferred = d2v::infer_vector(model, record.process_list, 50, infer_seed);
    degenerate = inferred.degenerate;
    for (std::size_t i = 0; i < kEmbeddingDim; ++i) x[kNumericFeatureCount + i] = inferred.vec[i];
  }
  if (degenerate_out) *degenerate_out = degenerate;
  return x;
}

// --- CSV ---

void write_feature_csv(const std::filesystem::path& path,
                       const std::vector<FeatureRecord>& records) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for write: " + path.string());
  f << "user,role,window_start,duration";
  for (const auto& name : numeric_feature_names()) f << ',' << name;
  f << ",process_list\n";
  for (const auto& rec : records) {
    f << rec.key.user << ',' << to_string(rec.key.role) << ',' << rec.key.window_start << ','
      << rec.key.duration;
    for (double v : rec.numeric) f << ',' << fmt_double(v);
    // tokens are ';'-joined inside a quoted field
    f << ",\"";
    for (std::size_t i = 0; i < rec.process_list.size(); ++i) {
      if (i) f << ';';
      f << rec.process_list[i];
    }
    f << "\"\n";
  }
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

std::vector<FeatureRecord> read_feature_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path.string());
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("empty feature CSV: " + path.string());
  const std::size_t expected = 4 + kNumericFeatureCount + 1;

  std::vector<FeatureRecord> out;
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != expected)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(expected) + " fields, got " +
                               std::to_string(fields.size()));
    FeatureRecord rec;
    rec.key.user = fields[0];
    rec.key.role = role_from_string(fields[1]);
    rec.key.window_start = std::stoll(fields[2]);
    rec.key.duration = std::stoll(fields[3]);
    for (std::size_t i = 0; i < kNumericFeatureCount; ++i) rec.numeric[i] = std::stod(fields[4 + i]);
    const std::string& plist = fields.back();
    std::stringstream ss(plist);
    std::string tok;
    while (std::getline(ss, tok, ';'))
      if (!tok.empty()) rec.process_list.push_back(tok);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<std::string> input_column_names() {
  std::vector<std::string> cols(numeric_feature_names().begin(), numeric_feature_names().end());
  for (std::size_t i = 0; i < kEmbeddingDim; ++i) cols.push_back("e" + std::to_string(i));
  return cols;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& X,
                      const std::vector<std::string>& columns) {
  if (columns.size() != X.cols())
    throw std::invalid_argument("write_matrix_csv: column name count mismatch");
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for write: " + path.string());
  for (std::size_t c = 0; c < columns.size(); ++c) f << (c ? "," : "") << columns[c];
  f << '\n';
  for (std::size_t r = 0; r < X.rows(); ++r) {
    for (std::size_t c = 0; c < X.cols(); ++c) f << (c ? "," : "") << fmt_double(X(r, c));
    f << '\n';
  }
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

Matrix read_matrix_csv(const std::filesystem::path& path, std::vector<std::string>* columns) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path.string());
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("empty matrix CSV: " + path.string());
  auto header = split_csv_line(line);
  if (columns) *columns = header;

  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw std::runtime_error(path.string() + ": ragged row " + std::to_string(rows + 2));
    for (const auto& s : fields) values.push_back(std::stod(s));
    ++rows;
  }
  Matrix X(rows, header.size());
  std::copy(values.begin(), values.end(), X.data());
  return X;
}

}  // namespace ueba::feat
