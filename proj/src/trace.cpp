#include "pdfp/trace.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "pdfp/errors.hpp"

namespace pdfp {
namespace {

std::vector<std::string> split_csv_row(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw ParseError("unterminated quote in trace row", line_no, line.size());
  fields.push_back(cur);
  return fields;
}

double parse_number(const std::string& s, std::size_t line, std::size_t col) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError("invalid number '" + s + "'", line, col);
  }
  if (used != s.size()) throw ParseError("invalid number '" + s + "'", line, col);
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& out, const IterationTrace& trace) {
  out << kTraceHeader << '\n';
  for (const TraceRecord& r : trace) {
    out << r.iter << ',' << format_double(r.time_s) << ',' << format_double(r.objective)
        << ',' << format_double(r.fp_residual) << ',';
    if (!std::isnan(r.consensus_residual)) out << format_double(r.consensus_residual);
    out << ',';
    if (r.active_set.size() > 1) out << '"';
    for (std::size_t i = 0; i < r.active_set.size(); ++i) {
      if (i > 0) out << ',';
      out << r.active_set[i];
    }
    if (r.active_set.size() > 1) out << '"';
    out << '\n';
  }
}

IterationTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty trace file", 1, 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw ParseError("unexpected trace header", 1, 1);

  IterationTrace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_row(line, line_no);
    if (f.size() != 6) throw ParseError("expected 6 fields", line_no, 1);
    TraceRecord r;
    const double iter = parse_number(f[0], line_no, 1);
    if (!(iter >= 0.0) || iter != std::floor(iter))
      throw ParseError("invalid iteration number", line_no, 1);
    r.iter = static_cast<std::size_t>(iter);
    r.time_s = parse_number(f[1], line_no, 2);
    r.objective = parse_number(f[2], line_no, 3);
    r.fp_residual = parse_number(f[3], line_no, 4);
    r.consensus_residual = parse_number(f[4], line_no, 5);
    if (!f[5].empty()) {
      std::stringstream ss(f[5]);
      std::string id;
      while (std::getline(ss, id, ',')) {
        const double v = parse_number(id, line_no, 6);
        if (!(v >= 0.0)) throw ParseError("invalid active-set id", line_no, 6);
        r.active_set.push_back(static_cast<std::size_t>(v));
      }
    }
    if (!trace.empty() && r.iter <= trace.back().iter)
      throw ParseError("iteration numbers must be strictly increasing", line_no, 1);
    trace.push_back(std::move(r));
  }
  return trace;
}

}  // namespace pdfp
