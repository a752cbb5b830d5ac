#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pdfp/linalg.hpp"

namespace pdfp {

// Convex differentiable function with an L-Lipschitz gradient.
class SmoothFn {
 public:
  virtual ~SmoothFn() = default;

  virtual std::size_t dim() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual void gradient(std::span<const double> x, std::span<double> out) const = 0;
  // Lipschitz constant L of the gradient (the step bound uses 1/L).
  virtual double lipschitz() const = 0;
  virtual std::string describe() const = 0;

  Vec gradient(std::span<const double> x) const;
};

using SmoothFnPtr = std::shared_ptr<const SmoothFn>;

// 1/2 ||A x - b||^2
class QuadraticLoss final : public SmoothFn {
 public:
  // L defaults to a power-iteration estimate of lambda_max(A^T A).
  QuadraticLoss(DenseMatrix a, Vec b, std::optional<double> lipschitz = std::nullopt);

  std::size_t dim() const override { return a_.cols; }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> out) const override;
  double lipschitz() const override { return lipschitz_; }
  std::string describe() const override;

  const DenseMatrix& matrix() const { return a_; }
  const Vec& target() const { return b_; }

 private:
  DenseMatrix a_;
  Vec b_;
  double lipschitz_;
};

// f(x_1, ..., x_N) = sum_n f_n(x_n) on the concatenated space.
class SeparableSum final : public SmoothFn {
 public:
  explicit SeparableSum(std::vector<SmoothFnPtr> parts);

  std::size_t dim() const override { return dim_; }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> out) const override;
  double lipschitz() const override { return lipschitz_; }
  std::string describe() const override;

 private:
  std::vector<SmoothFnPtr> parts_;
  std::vector<std::size_t> offsets_;
  std::size_t dim_ = 0;
  double lipschitz_ = 0.0;
};

// Override the reported Lipschitz constant (shared batch bounds, safety
// margins) without touching the value/gradient.
class WithLipschitz final : public SmoothFn {
 public:
  WithLipschitz(SmoothFnPtr inner, double lipschitz);

  std::size_t dim() const override { return inner_->dim(); }
  double value(std::span<const double> x) const override { return inner_->value(x); }
  void gradient(std::span<const double> x, std::span<double> out) const override {
    inner_->gradient(x, out);
  }
  double lipschitz() const override { return lipschitz_; }
  std::string describe() const override { return inner_->describe(); }

 private:
  SmoothFnPtr inner_;
  double lipschitz_;
};

}  // namespace pdfp
