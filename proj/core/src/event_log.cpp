#include "searchact/event_log.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>

namespace searchact {

LogParseError::LogParseError(int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

void EventLog::add(double time, std::string_view kind, int agent, std::string payload) {
  // Round through the text form so in-memory and replayed logs agree.
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", time);
  events_.push_back(LogEvent{std::strtod(buf, nullptr), std::string(kind), agent,
                             std::move(payload)});
}

std::string EventLog::text() const {
  std::string out;
  for (const LogEvent& e : events_) {
    out += format_event(e);
    out += '\n';
  }
  return out;
}

std::string format_event(const LogEvent& e) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f\t", e.time);
  std::string out = buf;
  out += e.kind;
  out += '\t';
  out += std::to_string(e.agent);
  out += '\t';
  out += e.payload;
  return out;
}

LogEvent parse_event(std::string_view line, int line_no) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) throw LogParseError(line_no, "expected 4 tab-separated fields");
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  fields.push_back(line.substr(start));

  LogEvent e;
  const std::string time(fields[0]);
  char* end = nullptr;
  errno = 0;
  e.time = std::strtod(time.c_str(), &end);
  if (time.empty() || *end != '\0' || errno != 0) throw LogParseError(line_no, "bad time '" + time + "'");
  if (fields[1].empty()) throw LogParseError(line_no, "empty event kind");
  e.kind = std::string(fields[1]);
  const std::string agent(fields[2]);
  e.agent = static_cast<int>(std::strtol(agent.c_str(), &end, 10));
  if (agent.empty() || *end != '\0') throw LogParseError(line_no, "bad agent '" + agent + "'");
  e.payload = std::string(fields[3]);
  return e;
}

std::vector<LogEvent> parse_log(std::istream& in) {
  std::vector<LogEvent> out;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.empty()) continue;
    out.push_back(parse_event(line, no));
  }
  return out;
}

}  // namespace searchact
