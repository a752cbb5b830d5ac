#include "pdfp/libsvm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "pdfp/errors.hpp"
#include "pdfp/trace.hpp"

namespace pdfp {
namespace {

struct RawRow {
  double label;
  std::vector<std::size_t> cols;
  std::vector<double> vals;
};

double parse_number(std::string_view tok, std::size_t line, std::size_t col) {
  double v = 0.0;
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || first == tok.data() + tok.size())
    throw ParseError("invalid number '" + std::string(tok) + "'", line, col);
  if (!std::isfinite(v)) throw ParseError("non-finite value", line, col);
  return v;
}

}  // namespace

LibsvmData parse_libsvm(std::istream& in, const LibsvmOptions& opts) {
  std::vector<RawRow> rows;
  std::size_t q = opts.min_features;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    RawRow row{};
    bool have_label = false;
    std::size_t last_index = 0;
    std::size_t pos = 0;
    while (pos < line.size()) {
      if (line[pos] == ' ' || line[pos] == '\t') {
        ++pos;
        continue;
      }
      const std::size_t start = pos;
      while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
      const std::string_view tok(line.data() + start, pos - start);
      const std::size_t col = start + 1;
      if (!have_label) {
        row.label = parse_number(tok, lineno, col);
        have_label = true;
        continue;
      }
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos)
        throw ParseError("expected <index>:<value>", lineno, col);
      const std::string_view idx_tok = tok.substr(0, colon);
      std::size_t idx = 0;
      const auto [ptr, ec] = std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), idx);
      if (ec != std::errc() || ptr != idx_tok.data() + idx_tok.size() || idx == 0)
        throw ParseError("feature index must be a positive integer", lineno, col);
      if (idx <= last_index)
        throw ParseError("feature indices must be strictly increasing", lineno, col);
      last_index = idx;
      row.cols.push_back(idx - 1);
      row.vals.push_back(parse_number(tok.substr(colon + 1), lineno, col + colon + 1));
    }
    if (!have_label) continue;
    q = std::max(q, last_index);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("dataset file contains no samples", lineno, 0);

  LibsvmData out;
  const bool binary01 = std::all_of(rows.begin(), rows.end(),
                                    [](const RawRow& r) { return r.label == 0.0 || r.label == 1.0; });
  out.labels_remapped = opts.map_binary_labels && binary01 &&
                        std::any_of(rows.begin(), rows.end(),
                                    [](const RawRow& r) { return r.label == 0.0; });
  CsrMatrix csr;
  csr.cols = q;
  for (const RawRow& r : rows) {
    csr.push_row(r.cols, r.vals);
    out.data.labels.push_back(out.labels_remapped ? (r.label == 0.0 ? -1.0 : 1.0) : r.label);
  }
  out.data.features = FeatureMatrix(std::move(csr));
  return out;
}

LibsvmData load_libsvm(const std::string& path, const LibsvmOptions& opts) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open dataset file " + path);
  return parse_libsvm(f, opts);
}

void write_libsvm(std::ostream& out, const Dataset& data) {
  for (std::size_t r = 0; r < data.m(); ++r) {
    out << format_double(data.labels.at(r));
    data.features.for_each_in_row(r, [&](std::size_t c, double v) {
      if (v != 0.0) out << ' ' << (c + 1) << ':' << format_double(v);
    });
    out << '\n';
  }
}

}  // namespace pdfp
