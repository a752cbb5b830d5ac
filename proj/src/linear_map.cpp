#include "pdfp/linear_map.hpp"

#include <algorithm>

#include "pdfp/errors.hpp"

namespace pdfp {
namespace {

void check(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw ShapeError(std::string(what) + ": expected dimension " +
                     std::to_string(want) + ", got " + std::to_string(got));
}

}  // namespace

Vec LinearMap::apply(std::span<const double> x) const {
  check(x.size(), in_dim(), "LinearMap::apply");
  Vec out(out_dim());
  apply(x, std::span<double>(out));
  return out;
}

Vec LinearMap::adjoint(std::span<const double> y) const {
  check(y.size(), out_dim(), "LinearMap::adjoint");
  Vec out(in_dim());
  apply_adjoint(y, std::span<double>(out));
  return out;
}

void IdentityMap::apply(std::span<const double> x, std::span<double> out) const {
  check(x.size(), dim_, "IdentityMap");
  check(out.size(), dim_, "IdentityMap");
  std::copy(x.begin(), x.end(), out.begin());
}

void IdentityMap::apply_adjoint(std::span<const double> y,
                                std::span<double> out) const {
  apply(y, out);
}

std::string IdentityMap::describe() const {
  return "identity(" + std::to_string(dim_) + ")";
}

void MatrixMap::apply(std::span<const double> x, std::span<double> out) const {
  check(x.size(), in_dim(), "MatrixMap");
  check(out.size(), out_dim(), "MatrixMap");
  if (m_->is_dense()) {
    gemv(m_->dense(), x, out);
    return;
  }
  for (std::size_t r = 0; r < m_->rows(); ++r) out[r] = m_->row_dot(r, x);
}

void MatrixMap::apply_adjoint(std::span<const double> y,
                              std::span<double> out) const {
  check(y.size(), out_dim(), "MatrixMap adjoint");
  check(out.size(), in_dim(), "MatrixMap adjoint");
  if (m_->is_dense()) {
    gemv_t(m_->dense(), y, out);
    return;
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t r = 0; r < m_->rows(); ++r) m_->add_row(r, y[r], out);
}

std::string MatrixMap::describe() const {
  return "matrix(" + std::to_string(out_dim()) + "x" + std::to_string(in_dim()) + ")";
}

void StackedWithIdentity::apply(std::span<const double> x,
                                std::span<double> out) const {
  check(out.size(), out_dim(), "StackedWithIdentity");
  d_->apply(x, out.first(d_->out_dim()));
  std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(d_->out_dim()));
}

void StackedWithIdentity::apply_adjoint(std::span<const double> y,
                                        std::span<double> out) const {
  check(y.size(), out_dim(), "StackedWithIdentity adjoint");
  d_->apply_adjoint(y.first(d_->out_dim()), out);
  const auto tail = y.subspan(d_->out_dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += tail[i];
}

std::optional<double> StackedWithIdentity::known_gram_max_eigenvalue() const {
  if (auto inner = d_->known_gram_max_eigenvalue()) return *inner + 1.0;
  return std::nullopt;
}

std::string StackedWithIdentity::describe() const {
  return "stack(" + d_->describe() + ", identity)";
}

}  // namespace pdfp
