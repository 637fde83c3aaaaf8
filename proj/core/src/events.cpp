#include "ueba/events.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace ueba::feat {

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::ProcessStart: return "process_start";
    case EventKind::LoginOk: return "login_ok";
    case EventKind::LoginFail: return "login_fail";
    case EventKind::AntivirusAlert: return "antivirus_alert";
    case EventKind::FirewallAlert: return "firewall_alert";
    case EventKind::EmailSent: return "email_sent";
    case EventKind::EmailReceived: return "email_received";
    case EventKind::EmailIncident: return "email_incident";
    case EventKind::Ps4100: return "ps_4100";
    case EventKind::Ps4104: return "ps_4104";
  }
  throw std::logic_error("to_string: unknown event kind");
}

EventKind event_kind_from_string(const std::string& s) {
  if (s == "process_start") return EventKind::ProcessStart;
  if (s == "login_ok") return EventKind::LoginOk;
  if (s == "login_fail") return EventKind::LoginFail;
  if (s == "antivirus_alert") return EventKind::AntivirusAlert;
  if (s == "firewall_alert") return EventKind::FirewallAlert;
  if (s == "email_sent") return EventKind::EmailSent;
  if (s == "email_received") return EventKind::EmailReceived;
  if (s == "email_incident") return EventKind::EmailIncident;
  if (s == "ps_4100") return EventKind::Ps4100;
  if (s == "ps_4104") return EventKind::Ps4104;
  throw std::invalid_argument("unknown event kind: " + s);
}

std::int64_t parse_iso8601_utc(const std::string& s) {
  // Expected: YYYY-MM-DDTHH:MM:SSZ
  std::tm tm{};
  int y, mo, d, h, mi, sec;
  if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%dZ", &y, &mo, &d, &h, &mi, &sec) != 6)
    throw std::invalid_argument("bad ISO-8601 timestamp: " + s);
  tm.tm_year = y - 1900;
  tm.tm_mon = mo - 1;
  tm.tm_mday = d;
  tm.tm_hour = h;
  tm.tm_min = mi;
  tm.tm_sec = sec;
  std::time_t t = timegm(&tm);
  if (t == static_cast<std::time_t>(-1)) throw std::invalid_argument("bad timestamp: " + s);
  return static_cast<std::int64_t>(t);
}

std::string format_iso8601_utc(std::int64_t epoch_seconds) {
  std::time_t t = static_cast<std::time_t>(epoch_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

std::vector<RawEvent> read_events_jsonl(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open events file: " + path.string());
  std::vector<RawEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": invalid JSON: " + e.what());
    }
    RawEvent ev;
    ev.time = parse_iso8601_utc(j.at("time").get<std::string>());
    ev.user = j.at("user").get<std::string>();
    ev.workstation = j.at("workstation").get<std::string>();
    ev.kind = event_kind_from_string(j.at("kind").get<std::string>());
    if (ev.user.empty())
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": empty user");
    if (j.contains("process")) ev.process = j["process"].get<std::string>();
    if (j.contains("email_size")) ev.email_size = j["email_size"].get<std::int64_t>();
    if (j.contains("email_files")) ev.email_files = j["email_files"].get<std::int64_t>();
    if (j.contains("email_links")) ev.email_links = j["email_links"].get<std::int64_t>();
    if (ev.email_size < 0 || ev.email_files < 0 || ev.email_links < 0)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": negative payload field");
    events.push_back(std::move(ev));
  }
  return events;
}

void write_events_jsonl(const std::filesystem::path& path, const std::vector<RawEvent>& events) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for write: " + path.string());
  for (const auto& ev : events) {
    nlohmann::json j;
    j["time"] = format_iso8601_utc(ev.time);
    j["user"] = ev.user;
    j["workstation"] = ev.workstation;
    j["kind"] = to_string(ev.kind);
    if (ev.kind == EventKind::ProcessStart) j["process"] = ev.process;
    if (ev.kind == EventKind::EmailSent || ev.kind == EventKind::EmailReceived ||
        ev.kind == EventKind::EmailIncident) {
      j["email_size"] = ev.email_size;
      j["email_files"] = ev.email_files;
      j["email_links"] = ev.email_links;
    }
    f << j.dump() << '\n';
  }
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace ueba::feat
