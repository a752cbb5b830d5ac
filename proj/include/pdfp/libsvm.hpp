#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "pdfp/problems.hpp"

namespace pdfp {

struct LibsvmOptions {
  // Map labels {0, 1} to {-1, +1} (only applied when every label is 0 or 1).
  bool map_binary_labels = false;
  // Lower bound on q; the inferred q is max(index, min_features).
  std::size_t min_features = 0;
};

struct LibsvmData {
  Dataset data;
  bool labels_remapped = false;
};

// Lines "<label> <index>:<value> ...", 1-based increasing indices; blank lines
// and '#' comments are skipped. Throws ParseError with line and column.
LibsvmData parse_libsvm(std::istream& in, const LibsvmOptions& opts = {});
LibsvmData load_libsvm(const std::string& path, const LibsvmOptions& opts = {});
// Zero features are omitted; values use %.17g.
void write_libsvm(std::ostream& out, const Dataset& data);

}  // namespace pdfp
