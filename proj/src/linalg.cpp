#include "pdfp/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "pdfp/errors.hpp"
#include "pdfp/kernels.hpp"

namespace pdfp {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void CsrMatrix::push_row(std::span<const std::size_t> cols_in_row,
                         std::span<const double> vals_in_row) {
  if (cols_in_row.size() != vals_in_row.size())
    throw ShapeError("sparse row: index/value count mismatch");
  for (std::size_t k = 0; k < cols_in_row.size(); ++k) {
    col_idx.push_back(cols_in_row[k]);
    values.push_back(vals_in_row[k]);
    cols = std::max(cols, cols_in_row[k] + 1);
  }
  row_ptr.push_back(col_idx.size());
  ++rows;
}

std::size_t FeatureMatrix::rows() const {
  return std::visit([](const auto& m) { return m.rows; }, storage_);
}

std::size_t FeatureMatrix::cols() const {
  return std::visit([](const auto& m) { return m.cols; }, storage_);
}

double FeatureMatrix::row_dot(std::size_t r, std::span<const double> x) const {
  if (const auto* d = std::get_if<DenseMatrix>(&storage_))
    return kernels::dot(d->row(r), x.first(d->cols));
  const auto& s = std::get<CsrMatrix>(storage_);
  double acc = 0.0;
  for (std::size_t k = s.row_ptr[r]; k < s.row_ptr[r + 1]; ++k)
    acc += s.values[k] * x[s.col_idx[k]];
  return acc;
}

void FeatureMatrix::add_row(std::size_t r, double alpha,
                            std::span<double> out) const {
  if (const auto* d = std::get_if<DenseMatrix>(&storage_)) {
    kernels::axpy(alpha, d->row(r), out.first(d->cols));
    return;
  }
  const auto& s = std::get<CsrMatrix>(storage_);
  for (std::size_t k = s.row_ptr[r]; k < s.row_ptr[r + 1]; ++k)
    out[s.col_idx[k]] += alpha * s.values[k];
}

DenseMatrix FeatureMatrix::to_dense() const {
  if (is_dense()) return dense();
  DenseMatrix out(rows(), cols());
  for (std::size_t r = 0; r < rows(); ++r)
    for_each_in_row(r, [&](std::size_t c, double v) { out(r, c) = v; });
  return out;
}

DenseMatrix FeatureMatrix::dense_rows(std::span<const std::size_t> sel) const {
  DenseMatrix out(sel.size(), cols());
  for (std::size_t i = 0; i < sel.size(); ++i) {
    if (sel[i] >= rows()) throw ParameterError("row index out of range");
    for_each_in_row(sel[i], [&](std::size_t c, double v) { out(i, c) = v; });
  }
  return out;
}

void gemv(const DenseMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.cols || y.size() != a.rows) throw ShapeError("gemv: shape mismatch");
  kernels::active().gemv(a.data.data(), a.rows, a.cols, x.data(), y.data());
}

void gemv_t(const DenseMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.rows || y.size() != a.cols) throw ShapeError("gemv_t: shape mismatch");
  kernels::active().gemv_t(a.data.data(), a.rows, a.cols, x.data(), y.data());
}

double norm2(std::span<const double> x) { return std::sqrt(kernels::squared_norm(x)); }

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("distance: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Vec sub(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("sub: size mismatch");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

}  // namespace pdfp
