#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "pdfp/linalg.hpp"

namespace pdfp {

// Linear operator D : X -> Y with its adjoint. Implementations are immutable
// and safe to share across threads.
class LinearMap {
 public:
  virtual ~LinearMap() = default;

  virtual std::size_t in_dim() const = 0;
  virtual std::size_t out_dim() const = 0;
  // out = D x
  virtual void apply(std::span<const double> x, std::span<double> out) const = 0;
  // out = D^T y
  virtual void apply_adjoint(std::span<const double> y,
                             std::span<double> out) const = 0;
  // Exact largest eigenvalue of D D^T when it is known in closed form.
  virtual std::optional<double> known_gram_max_eigenvalue() const {
    return std::nullopt;
  }
  virtual std::string describe() const = 0;

  Vec apply(std::span<const double> x) const;
  Vec adjoint(std::span<const double> y) const;
};

using LinearMapPtr = std::shared_ptr<const LinearMap>;

class IdentityMap final : public LinearMap {
 public:
  explicit IdentityMap(std::size_t dim) : dim_(dim) {}

  std::size_t in_dim() const override { return dim_; }
  std::size_t out_dim() const override { return dim_; }
  using LinearMap::apply;
  void apply(std::span<const double> x, std::span<double> out) const override;
  void apply_adjoint(std::span<const double> y, std::span<double> out) const override;
  std::optional<double> known_gram_max_eigenvalue() const override { return 1.0; }
  std::string describe() const override;

 private:
  std::size_t dim_;
};

// Multiplication by a stored matrix (dense or sparse rows).
class MatrixMap final : public LinearMap {
 public:
  explicit MatrixMap(std::shared_ptr<const FeatureMatrix> m) : m_(std::move(m)) {}
  explicit MatrixMap(DenseMatrix m)
      : m_(std::make_shared<const FeatureMatrix>(std::move(m))) {}

  std::size_t in_dim() const override { return m_->cols(); }
  std::size_t out_dim() const override { return m_->rows(); }
  using LinearMap::apply;
  void apply(std::span<const double> x, std::span<double> out) const override;
  void apply_adjoint(std::span<const double> y, std::span<double> out) const override;
  std::string describe() const override;

  const FeatureMatrix& matrix() const { return *m_; }

 private:
  std::shared_ptr<const FeatureMatrix> m_;
};

// x -> (D x, x). Folding g into the dual side uses exactly this map, and
// lambda_max of its Gram operator is lambda_max(D D^T) + 1.
class StackedWithIdentity final : public LinearMap {
 public:
  explicit StackedWithIdentity(LinearMapPtr d) : d_(std::move(d)) {}

  std::size_t in_dim() const override { return d_->in_dim(); }
  std::size_t out_dim() const override { return d_->out_dim() + d_->in_dim(); }
  using LinearMap::apply;
  void apply(std::span<const double> x, std::span<double> out) const override;
  void apply_adjoint(std::span<const double> y, std::span<double> out) const override;
  std::optional<double> known_gram_max_eigenvalue() const override;
  std::string describe() const override;

 private:
  LinearMapPtr d_;
};

}  // namespace pdfp
