#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace pdfp {

using Vec = std::vector<double>;

// Row-major dense matrix.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }

  static DenseMatrix identity(std::size_t n);
};

// Compressed sparse rows.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col_idx;
  std::vector<double> values;

  void push_row(std::span<const std::size_t> cols_in_row,
                std::span<const double> vals_in_row);
};

// Feature storage of a dataset: dense for generated problems, sparse rows for
// loaded files.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(DenseMatrix m) : storage_(std::move(m)) {}
  explicit FeatureMatrix(CsrMatrix m) : storage_(std::move(m)) {}

  std::size_t rows() const;
  std::size_t cols() const;
  bool is_dense() const { return std::holds_alternative<DenseMatrix>(storage_); }
  const DenseMatrix& dense() const { return std::get<DenseMatrix>(storage_); }
  const CsrMatrix& sparse() const { return std::get<CsrMatrix>(storage_); }

  double row_dot(std::size_t r, std::span<const double> x) const;
  // out += alpha * row r
  void add_row(std::size_t r, double alpha, std::span<double> out) const;
  // Visits (column, value) for the stored entries of row r.
  template <class F>
  void for_each_in_row(std::size_t r, F&& f) const {
    if (const auto* d = std::get_if<DenseMatrix>(&storage_)) {
      for (std::size_t c = 0; c < d->cols; ++c) f(c, (*d)(r, c));
    } else {
      const auto& s = std::get<CsrMatrix>(storage_);
      for (std::size_t k = s.row_ptr[r]; k < s.row_ptr[r + 1]; ++k)
        f(s.col_idx[k], s.values[k]);
    }
  }

  DenseMatrix to_dense() const;
  // Rows listed in `rows`, in that order, as a dense matrix.
  DenseMatrix dense_rows(std::span<const std::size_t> rows) const;

 private:
  std::variant<DenseMatrix, CsrMatrix> storage_;
};

// y = A x and y = A^T x through the active kernel table.
void gemv(const DenseMatrix& a, std::span<const double> x, std::span<double> y);
void gemv_t(const DenseMatrix& a, std::span<const double> x, std::span<double> y);

double norm2(std::span<const double> x);
double norm_inf(std::span<const double> x);
// ||a - b||_2
double distance(std::span<const double> a, std::span<const double> b);
Vec sub(std::span<const double> a, std::span<const double> b);

}  // namespace pdfp
