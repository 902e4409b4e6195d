#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qnopt/linalg.hpp"

namespace qnopt {

enum class TraceEvent {
  Normal,
  SkippedUpdate,      // curvature too small, approximation left unchanged
  DegenerateScaling,  // a <= 1e-12, unscaled BFGS used for this update
  Fallback,           // best-trial line search, identity reset or Cauchy step
  Rejected            // trust-region step rejected, x unchanged
};

const char* to_string(TraceEvent e);
std::optional<TraceEvent> parse_trace_event(std::string_view text);

/// One row per iteration. Row 0 describes the starting point. alpha holds
/// the accepted step length, or the radius used in trust-region mode.
struct TraceRecord {
  std::size_t iter = 0;
  real f = 0;
  real gnorm_l2 = 0;
  real gnorm_inf = 0;
  real alpha = 0;
  std::size_t n_fev = 0;
  std::size_t n_gev = 0;
  double elapsed_s = 0;
  TraceEvent event = TraceEvent::Normal;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

inline constexpr std::string_view kTraceHeader = "iter,f,gnorm_l2,gnorm_inf,alpha,n_fev,n_gev,elapsed_s,event";

/// %.17g, enough digits for an exact round trip of a double.
std::string format_real(double v);

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& rows);
void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& rows);

/// Parses a trace written by write_trace_csv; throws std::runtime_error
/// naming the line on malformed input.
std::vector<TraceRecord> read_trace_csv(std::istream& in);
std::vector<TraceRecord> read_trace_csv(const std::string& path);

}  // namespace qnopt
