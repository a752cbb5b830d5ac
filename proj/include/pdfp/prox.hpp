#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pdfp/linalg.hpp"

namespace pdfp {

// Feasibility tolerance used when evaluating indicator functions.
inline constexpr double kIndicatorTolerance = 1e-9;

// sign(x_i) * max(|x_i| - tau, 0). Throws ParameterError for tau < 0.
Vec soft_threshold(std::span<const double> x, double tau);

// Orthogonal projection of (a, b) onto {(c, c)}: both slots become (a+b)/2.
std::pair<Vec, Vec> project_pair_consensus(std::span<const double> a,
                                           std::span<const double> b);

// Replaces every block by the blockwise mean.
std::vector<Vec> project_consensus(const std::vector<Vec>& blocks);

// A point (v, x) of the dual-primal product space.
struct ProductPoint {
  Vec v;
  Vec x;
};

// sqrt(||x||^2 + lambda ||v||^2)
double lambda_norm(std::span<const double> v, std::span<const double> x,
                   double lambda);
double lambda_norm(const ProductPoint& u, double lambda);

// Proximable convex function from a fixed catalog. Indicator entries ignore
// the prox scale (the prox of c * indicator is the projection for any c > 0).
class ProxFn {
 public:
  struct Zero {};
  struct L1 {
    double weight;
  };
  // Indicator of {x in X^blocks : x_1 = ... = x_blocks}.
  struct Consensus {
    std::size_t blocks;
    std::size_t block_dim;
  };
  // Sum over consecutive pairs (a, b) of block_dim-sized slots of the
  // indicator of {a = b}.
  struct PairConsensus {
    std::size_t block_dim;
  };
  // x = (x_1, ..., x_N) with each x_n of block_dim entries, value sum g_n(x_n).
  struct BlockSeparable {
    std::shared_ptr<const std::vector<ProxFn>> parts;
    std::size_t block_dim;
  };

  ProxFn() : kind_(Zero{}) {}

  static ProxFn zero() { return ProxFn(Zero{}); }
  static ProxFn l1(double weight);
  static ProxFn consensus(std::size_t blocks, std::size_t block_dim);
  static ProxFn pair_consensus(std::size_t block_dim);
  static ProxFn block_separable(std::vector<ProxFn> parts, std::size_t block_dim);

  // argmin_y scale * fn(y) + 1/2 ||x - y||^2
  Vec prox(std::span<const double> x, double scale) const;
  // (I - prox_{scale * fn})(x), computed directly where a closed form exists.
  Vec residual(std::span<const double> x, double scale) const;
  // Function value; +infinity outside an indicator's set.
  double value(std::span<const double> x) const;

  bool is_zero() const;
  bool is_indicator() const;
  std::string describe() const;

  const auto& kind() const { return kind_; }

 private:
  using Kind = std::variant<Zero, L1, Consensus, PairConsensus, BlockSeparable>;
  explicit ProxFn(Kind k) : kind_(std::move(k)) {}

  Kind kind_;
};

}  // namespace pdfp
