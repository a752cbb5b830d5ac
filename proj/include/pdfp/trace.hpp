#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pdfp {

// One logged iteration. consensus_residual is NaN where it does not apply
// (centralized runs) and is written as an empty CSV field.
struct TraceRecord {
  std::size_t iter = 0;
  double time_s = 0.0;
  double objective = 0.0;
  double fp_residual = 0.0;
  double consensus_residual = 0.0;
  std::vector<std::size_t> active_set;
};

using IterationTrace = std::vector<TraceRecord>;

inline constexpr std::string_view kTraceHeader =
    "iter,time_s,objective,fp_residual,consensus_residual,active_set";

// Writes the header followed by one row per record. Numbers use %.17g so a
// trace read back is bit-identical. active_set is comma-joined and quoted
// when it holds more than one id.
void write_trace_csv(std::ostream& out, const IterationTrace& trace);

// Parses a trace written by write_trace_csv. Throws ParseError on a header
// mismatch or malformed row.
IterationTrace read_trace_csv(std::istream& in);

std::string format_double(double v);

}  // namespace pdfp
