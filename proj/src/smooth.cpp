#include "pdfp/smooth.hpp"

#include <algorithm>

#include "pdfp/errors.hpp"
#include "pdfp/kernels.hpp"
#include "pdfp/linear_map.hpp"
#include "pdfp/opnorm.hpp"

namespace pdfp {

Vec SmoothFn::gradient(std::span<const double> x) const {
  if (x.size() != dim()) throw ShapeError("gradient: dimension mismatch");
  Vec g(dim());
  gradient(x, std::span<double>(g));
  return g;
}

QuadraticLoss::QuadraticLoss(DenseMatrix a, Vec b, std::optional<double> lipschitz)
    : a_(std::move(a)), b_(std::move(b)) {
  if (b_.size() != a_.rows) throw ShapeError("QuadraticLoss: b does not match rows of A");
  if (lipschitz) {
    if (!(*lipschitz > 0.0)) throw ParameterError("QuadraticLoss: lipschitz must be positive");
    lipschitz_ = *lipschitz;
  } else {
    lipschitz_ = power_iteration_opnorm(MatrixMap(a_));
  }
}

double QuadraticLoss::value(std::span<const double> x) const {
  if (x.size() != dim()) throw ShapeError("QuadraticLoss: dimension mismatch");
  Vec r(a_.rows);
  gemv(a_, x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b_[i];
  return 0.5 * kernels::squared_norm(r);
}

void QuadraticLoss::gradient(std::span<const double> x, std::span<double> out) const {
  if (x.size() != dim() || out.size() != dim())
    throw ShapeError("QuadraticLoss: dimension mismatch");
  Vec r(a_.rows);
  gemv(a_, x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b_[i];
  gemv_t(a_, r, out);
}

std::string QuadraticLoss::describe() const {
  return "quadratic(" + std::to_string(a_.rows) + "x" + std::to_string(a_.cols) + ")";
}

SeparableSum::SeparableSum(std::vector<SmoothFnPtr> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw ParameterError("SeparableSum: no parts");
  for (const auto& p : parts_) {
    offsets_.push_back(dim_);
    dim_ += p->dim();
    lipschitz_ = std::max(lipschitz_, p->lipschitz());
  }
}

double SeparableSum::value(std::span<const double> x) const {
  if (x.size() != dim_) throw ShapeError("SeparableSum: dimension mismatch");
  double total = 0.0;
  for (std::size_t n = 0; n < parts_.size(); ++n)
    total += parts_[n]->value(x.subspan(offsets_[n], parts_[n]->dim()));
  return total;
}

void SeparableSum::gradient(std::span<const double> x, std::span<double> out) const {
  if (x.size() != dim_ || out.size() != dim_)
    throw ShapeError("SeparableSum: dimension mismatch");
  for (std::size_t n = 0; n < parts_.size(); ++n)
    parts_[n]->gradient(x.subspan(offsets_[n], parts_[n]->dim()),
                        out.subspan(offsets_[n], parts_[n]->dim()));
}

std::string SeparableSum::describe() const {
  return "separable_sum(" + std::to_string(parts_.size()) + " x " +
         parts_.front()->describe() + ")";
}

WithLipschitz::WithLipschitz(SmoothFnPtr inner, double lipschitz)
    : inner_(std::move(inner)), lipschitz_(lipschitz) {
  if (!(lipschitz_ > 0.0)) throw ParameterError("lipschitz constant must be positive");
}

}  // namespace pdfp
