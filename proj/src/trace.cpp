#include "qnopt/trace.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qnopt {

const char* to_string(TraceEvent e) {
  switch (e) {
    case TraceEvent::Normal: return "normal";
    case TraceEvent::SkippedUpdate: return "skipped_update";
    case TraceEvent::DegenerateScaling: return "degenerate_scaling";
    case TraceEvent::Fallback: return "fallback";
    case TraceEvent::Rejected: return "rejected";
  }
  return "normal";
}

std::optional<TraceEvent> parse_trace_event(std::string_view text) {
  for (TraceEvent e : {TraceEvent::Normal, TraceEvent::SkippedUpdate, TraceEvent::DegenerateScaling,
                       TraceEvent::Fallback, TraceEvent::Rejected}) {
    if (text == to_string(e)) return e;
  }
  return std::nullopt;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& rows) {
  out << kTraceHeader << '\n';
  for (const auto& r : rows) {
    out << r.iter << ',' << format_real(r.f) << ',' << format_real(r.gnorm_l2) << ',' << format_real(r.gnorm_inf)
        << ',' << format_real(r.alpha) << ',' << r.n_fev << ',' << r.n_gev << ',' << format_real(r.elapsed_s) << ','
        << to_string(r.event) << '\n';
  }
}

void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open trace file for writing: " + path);
  write_trace_csv(out, rows);
  if (!out) throw std::runtime_error("failed writing trace file: " + path);
}

namespace {

[[noreturn]] void malformed(std::size_t line, const std::string& why) {
  throw std::runtime_error("trace CSV line " + std::to_string(line) + ": " + why);
}

double parse_double(const std::string& field, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE) malformed(line, "bad number '" + field + "'");
  return v;
}

std::size_t parse_count(const std::string& field, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(field.c_str(), &end, 10);
  if (field.empty() || field[0] == '-' || end != field.c_str() + field.size() || errno == ERANGE) {
    malformed(line, "bad count '" + field + "'");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
  std::vector<TraceRecord> rows;
  std::string text;
  std::size_t line = 1;
  if (!std::getline(in, text) || text != kTraceHeader) malformed(line, "missing or unexpected header");
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 9) malformed(line, "expected 9 fields");
    TraceRecord r;
    r.iter = parse_count(fields[0], line);
    r.f = static_cast<real>(parse_double(fields[1], line));
    r.gnorm_l2 = static_cast<real>(parse_double(fields[2], line));
    r.gnorm_inf = static_cast<real>(parse_double(fields[3], line));
    r.alpha = static_cast<real>(parse_double(fields[4], line));
    r.n_fev = parse_count(fields[5], line);
    r.n_gev = parse_count(fields[6], line);
    r.elapsed_s = parse_double(fields[7], line);
    const auto ev = parse_trace_event(fields[8]);
    if (!ev) malformed(line, "unknown event '" + fields[8] + "'");
    r.event = *ev;
    rows.push_back(r);
  }
  return rows;
}

std::vector<TraceRecord> read_trace_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  return read_trace_csv(in);
}

}  // namespace qnopt
