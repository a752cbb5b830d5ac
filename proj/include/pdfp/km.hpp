#pragma once

// Randomized Krasnosel'skii-Mann iteration with coordinate-block masking.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "pdfp/linalg.hpp"
#include "pdfp/trace.hpp"

namespace pdfp {

// T : V -> V together with a partition of the coordinates of V into J blocks.
// The j-th block map T_j is the slice of T's output on block j, so applying
// every block is T itself. An optional per-coordinate weight vector w makes
// the residual norm sqrt(sum_i w_i d_i^2) (the lambda-weighted product norm
// uses w = lambda on dual coordinates and 1 on primal ones).
class BlockOperator {
 public:
  using Map = std::function<Vec(std::span<const double>)>;

  // Throws ParameterError unless `blocks` is a disjoint cover of [0, dim).
  BlockOperator(std::size_t dim, Map map, std::vector<std::vector<std::size_t>> blocks,
                Vec norm_weights = {});

  // J contiguous blocks of (almost) equal size.
  static BlockOperator contiguous(std::size_t dim, Map map, std::size_t block_count,
                                  Vec norm_weights = {});

  std::size_t dim() const { return dim_; }
  std::size_t block_count() const { return blocks_.size(); }
  const std::vector<std::size_t>& block(std::size_t j) const { return blocks_.at(j); }
  const Vec& norm_weights() const { return weights_; }

  Vec apply(std::span<const double> x) const;
  Vec apply_block(std::span<const double> x, std::size_t j) const;
  // Norm of d in the configured (weighted) norm.
  double norm(std::span<const double> d) const;

 private:
  std::size_t dim_;
  Map map_;
  std::vector<std::vector<std::size_t>> blocks_;
  Vec weights_;
};

// Output block j is T_j(x) for j in kappa and x_j otherwise.
Vec masked_apply(const BlockOperator& t, std::span<const double> x,
                 std::span<const std::size_t> kappa);

// x + beta (T x - x), beta in (0, 1].
Vec km_step(const BlockOperator& t, std::span<const double> x, double beta);

// ||T x - x|| in the operator's norm.
double fixed_point_residual(const BlockOperator& t, std::span<const double> x);

// I.i.d. random subsets of {0, ..., J-1}. Every block has positive selection
// probability; constructors reject configurations where some block never
// gets selected.
class CoordinateSampler {
 public:
  enum class Mode { SingleUniform, SingleWeighted, Independent, Full };

  static CoordinateSampler single_uniform(std::size_t blocks, std::uint64_t seed);
  // One block per draw with probability proportional to weights[j] > 0.
  static CoordinateSampler single_weighted(std::vector<double> weights, std::uint64_t seed);
  // Each block included independently with probability p in (0, 1].
  static CoordinateSampler independent(std::size_t blocks, double p, std::uint64_t seed);
  static CoordinateSampler full(std::size_t blocks);

  std::vector<std::size_t> sample();
  std::size_t block_count() const { return blocks_; }
  Mode mode() const { return mode_; }
  // Marginal probability that block j is part of a draw.
  double inclusion_probability(std::size_t j) const;

 private:
  CoordinateSampler(Mode mode, std::size_t blocks, std::uint64_t seed);

  Mode mode_;
  std::size_t blocks_;
  double p_ = 1.0;
  std::vector<double> weights_;
  std::mt19937_64 rng_;
};

// Relaxation sequence k -> beta_k.
class RelaxationSchedule {
 public:
  // Constant beta in (0, 1). beta = 1 must go through paper_literal().
  static RelaxationSchedule constant(double beta);
  // beta_k = 1: updated coordinates are set to T's output directly.
  static RelaxationSchedule paper_literal();
  // Arbitrary schedule; every returned value is checked to lie in (0, 1].
  static RelaxationSchedule custom(std::function<double(std::size_t)> fn);

  double at(std::size_t k) const;

 private:
  explicit RelaxationSchedule(std::function<double(std::size_t)> fn) : fn_(std::move(fn)) {}
  std::function<double(std::size_t)> fn_;
};

struct StoppingRule {
  std::size_t max_iter = 100000;
  double tol = 1e-8;
};

struct KmResult {
  Vec x;
  // ||T x^k - x^k|| for k = 0, 1, ... (one entry per evaluated iterate).
  std::vector<double> residuals;
  IterationTrace trace;
  std::size_t iterations = 0;
  bool converged = false;
};

// x^{k+1} = x^k + beta_k (That^{kappa_{k+1}} x^k - x^k) until the residual
// drops below stop.tol or stop.max_iter updates were made.
KmResult randomized_km_run(const BlockOperator& t, std::span<const double> x0,
                           CoordinateSampler& sampler, const RelaxationSchedule& schedule,
                           const StoppingRule& stop);

}  // namespace pdfp
