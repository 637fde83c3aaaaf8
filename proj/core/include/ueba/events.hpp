#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ueba::feat {

enum class EventKind {
  ProcessStart,
  LoginOk,
  LoginFail,
  AntivirusAlert,
  FirewallAlert,
  EmailSent,
  EmailReceived,
  EmailIncident,
  Ps4100,
  Ps4104,
};

std::string to_string(EventKind k);
EventKind event_kind_from_string(const std::string& s);

/// One timestamped log record for one user/workstation. The JSONL wire format
/// uses the same field names: time (ISO-8601 UTC), user, workstation, kind,
/// plus kind-specific payload fields (process; email_size, email_files,
/// email_links).
struct RawEvent {
  std::int64_t time = 0;  // UTC epoch seconds
  std::string user;
  std::string workstation;
  EventKind kind = EventKind::ProcessStart;
  std::string process;  // process_start only: executable path
  std::int64_t email_size = 0;
  std::int64_t email_files = 0;
  std::int64_t email_links = 0;
};

std::int64_t parse_iso8601_utc(const std::string& s);
std::string format_iso8601_utc(std::int64_t epoch_seconds);

std::vector<RawEvent> read_events_jsonl(const std::filesystem::path& path);
void write_events_jsonl(const std::filesystem::path& path, const std::vector<RawEvent>& events);

}  // namespace ueba::feat
