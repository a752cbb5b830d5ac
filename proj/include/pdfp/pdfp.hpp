#pragma once

// Centralized primal-dual fixed-point solvers for
//
//   min_x  f(x) + g(x) + h(D x)
//
// with f smooth, g and h proximable and D linear. The two-block scheme
// handles g = 0; the split scheme carries an extra auxiliary variable y for g.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdfp/km.hpp"
#include "pdfp/linear_map.hpp"
#include "pdfp/prox.hpp"
#include "pdfp/smooth.hpp"
#include "pdfp/trace.hpp"

namespace pdfp {

struct CompositeProblem {
  SmoothFnPtr f;
  ProxFn g;
  ProxFn h;
  LinearMapPtr d;

  // Throws ShapeError unless dim f = dim g-space = D.in_dim().
  void validate() const;
  std::size_t primal_dim() const { return d->in_dim(); }
  std::size_t dual_dim() const { return d->out_dim(); }
  // f(x) + g(x) + h(D x); +infinity when D x leaves an indicator's set.
  double objective(std::span<const double> x) const;
};

enum class Scheme {
  Pdfp2o,   // two blocks (v, x); requires g = 0
  Spdfp2o,  // three blocks (v, y, x)
};

const char* scheme_name(Scheme s);

struct PdfpParams {
  double gamma = 0.0;   // primal step, 0 < gamma < 2 / L
  double lambda = 0.0;  // dual step, 0 < lambda <= 1 / opnorm
  // Denominator of the lambda bound: lambda_max(D D^T) for Pdfp2o,
  // lambda_max(D D^T) + 1 for Spdfp2o.
  double opnorm = 1.0;
  std::string bound_label = "1/opnorm";
};

// Checks 0 < gamma < 2 beta (beta = 1/L, strict) and 0 < lambda <= 1/opnorm.
// Throws ConfigError naming the violated inequality and the bound value.
void validate_params(const CompositeProblem& problem, const PdfpParams& params);

// Fills the step sizes for `scheme`: gamma = beta = 1/L and
// lambda = 1/opnorm when not given, where opnorm uses the exact Gram
// eigenvalue when the map knows it and a safety-inflated power-iteration
// estimate otherwise. The result is validated.
PdfpParams resolve_params(const CompositeProblem& problem, Scheme scheme,
                          std::optional<double> gamma = std::nullopt,
                          std::optional<double> lambda = std::nullopt);

struct SolverState {
  Vec v;  // dual, in Y
  Vec y;  // auxiliary dual for g, in X (kept at zero by the two-block scheme)
  Vec x;  // primal, in X
};

SolverState zero_state(const CompositeProblem& problem);

// v+ = (I - prox_{(gamma/lambda) h})(D(x - gamma grad f(x)) + (I - lambda D D^T) v)
// x+ = x - gamma grad f(x) - lambda D^T v+
// Throws ModeError when g is not the zero function.
SolverState pdfp2o_step(const SolverState& s, const CompositeProblem& problem,
                        const PdfpParams& params);

// With x_half = x - gamma grad f(x):
//   v+ = (I - prox_{(gamma/lambda) h})(D x_half + (I - lambda D D^T) v - lambda D y)
//   y+ = (I - prox_{(gamma/lambda) g})(x_half + (1 - lambda) y - lambda D^T v)
//   x+ = x_half - lambda D^T v+ - lambda y+
// v+ and y+ both read the old state only.
SolverState spdfp2o_step(const SolverState& s, const CompositeProblem& problem,
                         const PdfpParams& params);

SolverState step(Scheme scheme, const SolverState& s, const CompositeProblem& problem,
                 const PdfpParams& params);

// Flattening of (v, y, x) used by the fixed-point view: [v | y | x].
Vec pack_state(const SolverState& s);
SolverState unpack_state(std::span<const double> u, const CompositeProblem& problem);
// Norm weights of the lambda product norm on [v | y | x].
Vec lambda_weights(const CompositeProblem& problem, double lambda);
// ||(v, y, x)||_lambda = sqrt(||x||^2 + lambda (||v||^2 + ||y||^2))
double state_lambda_norm(const SolverState& s, double lambda);
double state_lambda_distance(const SolverState& a, const SolverState& b, double lambda);

// One split-scheme step seen as T : V -> V on [v | y | x]. `blocks` is the
// caller's coordinate partition of V; when empty the three natural blocks
// (v, y, x) are used. Full-mask application equals spdfp2o_step bit for bit.
BlockOperator as_fixed_point_operator(const CompositeProblem& problem, const PdfpParams& params,
                                      std::vector<std::vector<std::size_t>> blocks = {});

struct SolveOptions {
  Scheme scheme = Scheme::Spdfp2o;
  StoppingRule stop{};
  std::size_t log_every = 1;
  // Abort when ||u^k|| exceeds divergence_factor * (1 + ||u^0||).
  double divergence_factor = 1e12;
};

struct SolveResult {
  SolverState state;
  IterationTrace trace;
  std::size_t iterations = 0;
  bool converged = false;
  double final_residual = 0.0;
};

// Iterates the selected scheme until ||u^{k+1} - u^k||_lambda <= stop.tol or
// stop.max_iter steps. Throws DivergenceError on blow-up.
SolveResult solve(const CompositeProblem& problem, const PdfpParams& params,
                  const SolverState& init, const SolveOptions& opts = {});

}  // namespace pdfp
