#pragma once

#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace searchact {

/// One log line: `time<TAB>KIND<TAB>agent<TAB>payload`, time as %.6f and
/// agent -1 for world events.
struct LogEvent {
  double time = 0.0;
  std::string kind;
  int agent = -1;
  std::string payload;

  friend bool operator==(const LogEvent&, const LogEvent&) = default;
};

class LogParseError : public std::runtime_error {
 public:
  LogParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

class EventLog {
 public:
  void add(double time, std::string_view kind, int agent, std::string payload = {});
  const std::vector<LogEvent>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  std::string text() const;

 private:
  std::vector<LogEvent> events_;
};

std::string format_event(const LogEvent& e);
/// Throws LogParseError carrying `line_no`.
LogEvent parse_event(std::string_view line, int line_no);
std::vector<LogEvent> parse_log(std::istream& in);

}  // namespace searchact
