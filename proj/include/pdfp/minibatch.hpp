#pragma once

// Minibatch splitting of  min_x sum_n f_n(x) + g_n(x): one replica x_n per
// batch, coupled through the indicator of the consensus set, solved with the
// split scheme on the product space (deterministic full sweep) or with one
// randomly selected batch per iteration.

#include <cstddef>
#include <span>
#include <vector>

#include "pdfp/km.hpp"
#include "pdfp/pdfp.hpp"

namespace pdfp {

struct BatchedProblem {
  std::vector<SmoothFnPtr> f;
  std::vector<ProxFn> g;
  std::size_t dim = 0;
  // Common Lipschitz bound of every grad f_n; 0 means max_n f_n->lipschitz().
  double common_lipschitz = 0.0;

  std::size_t batches() const { return f.size(); }
  double lipschitz() const;
  // Throws unless N >= 1, |f| = |g| and every f_n acts on `dim`.
  void validate() const;
  // sum_n f_n(x) + g_n(x) at a common point x.
  double objective(std::span<const double> x) const;
};

struct MinibatchState {
  std::vector<Vec> v;
  std::vector<Vec> y;
  std::vector<Vec> x;

  Vec mean_x() const;
  Vec mean_v() const;
  // max_n ||x_n - mean x||
  double consensus_residual() const;
};

MinibatchState zero_minibatch_state(const BatchedProblem& batched);

// Product-space problem: f = sum f_n(x_n), g = sum g_n(x_n), h = indicator of
// the consensus set, D = identity on X^N (so lambda_max(DD^T) + 1 = 2).
CompositeProblem lift_problem(const BatchedProblem& batched);

// Step sizes for the lifted problem (lambda bound 1/2).
PdfpParams resolve_minibatch_params(const BatchedProblem& batched,
                                    std::optional<double> gamma = std::nullopt,
                                    std::optional<double> lambda = std::nullopt);

SolverState to_lifted(const MinibatchState& s);
MinibatchState from_lifted(const SolverState& s, std::size_t batches);

// Coordinate partition S_n of [v | y | x] on the lifted space: block n holds
// (v_n, y_n, x_n).
std::vector<std::vector<std::size_t>> minibatch_blocks(const BatchedProblem& batched);

// s = (1/N) sum_n (x_n - gamma grad f_n(x_n) - lambda y_n)
Vec aggregate_s(const MinibatchState& s, const BatchedProblem& batched, double gamma,
                double lambda);

// Full sweep over all batches with the aggregate s subtracted from every dual
// (valid when the mean dual is zero, which then stays zero). Throws
// ConfigError when the mean of the duals is not zero.
MinibatchState minibatch_step(const MinibatchState& s, const BatchedProblem& batched,
                              const PdfpParams& params);

// Updates batch `zeta` only; every other batch is carried over unchanged.
// The subtracted aggregate is the mean of the projected quantity,
// s + (1 - lambda) * mean(v), which keeps the update equal to the selected
// block of the lifted fixed-point operator for any mean dual.
MinibatchState smspdfp2o_step(const MinibatchState& s, const BatchedProblem& batched,
                              const PdfpParams& params, std::size_t zeta);

struct StochasticOptions {
  StoppingRule stop{};
  std::size_t log_every = 1;
  // Maintain the aggregates by adjusting for the changed batches instead of
  // re-summing every iteration.
  bool incremental_aggregates = false;
};

struct StochasticResult {
  MinibatchState state;
  IterationTrace trace;
  std::size_t iterations = 0;
  bool converged = false;
  double final_residual = 0.0;
};

// Draws batch sets from `sampler` (a full sampler gives the deterministic
// minibatch sweep) and applies the corresponding block updates. The trace
// records the objective at the batch average, the consensus residual and the
// fixed-point residual ||T u - u||_lambda of the lifted operator. Stops when
// that residual is <= stop.tol.
StochasticResult run_stochastic(const BatchedProblem& batched, const PdfpParams& params,
                                const MinibatchState& init, CoordinateSampler& sampler,
                                const StochasticOptions& opts = {});

}  // namespace pdfp
