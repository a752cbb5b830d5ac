#include "pdfp/pdfp.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>

#include "pdfp/errors.hpp"
#include "pdfp/kernels.hpp"
#include "pdfp/opnorm.hpp"

namespace pdfp {
namespace {

// shortest representation that round-trips
std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void check_state(const SolverState& s, const CompositeProblem& p) {
  if (s.v.size() != p.dual_dim() || s.y.size() != p.primal_dim() ||
      s.x.size() != p.primal_dim())
    throw ShapeError("solver state does not match the problem dimensions");
}

// x - gamma grad f(x)
Vec forward_step(const CompositeProblem& p, std::span<const double> x, double gamma) {
  const Vec grad = p.f->gradient(x);
  Vec xh(x.size());
  kernels::lincomb(1.0, x, -gamma, grad, xh);
  return xh;
}

}  // namespace

void CompositeProblem::validate() const {
  if (!f || !d) throw ShapeError("composite problem: missing f or D");
  if (f->dim() != d->in_dim())
    throw ShapeError("composite problem: dim f = " + std::to_string(f->dim()) +
                     " but D maps from dimension " + std::to_string(d->in_dim()));
}

double CompositeProblem::objective(std::span<const double> x) const {
  const Vec dx = d->apply(x);
  return f->value(x) + g.value(x) + h.value(dx);
}

const char* scheme_name(Scheme s) {
  return s == Scheme::Pdfp2o ? "pdfp2o" : "spdfp2o";
}

void validate_params(const CompositeProblem& problem, const PdfpParams& params) {
  problem.validate();
  const double lip = problem.f->lipschitz();
  const double beta = 1.0 / lip;
  if (!(params.gamma > 0.0) || !(params.gamma < 2.0 * beta))
    throw ConfigError("gamma " + num(params.gamma) + " violates 0 < gamma < 2*beta = " +
                      num(2.0 * beta) + " (beta = 1/L, L = " + num(lip) + ")");
  if (!(params.opnorm > 0.0)) throw ConfigError("opnorm must be positive");
  const double bound = 1.0 / params.opnorm;
  if (!(params.lambda > 0.0))
    throw ConfigError("lambda " + num(params.lambda) + " violates 0 < lambda");
  if (!(params.lambda <= bound))
    throw ConfigError("lambda " + num(params.lambda) + " exceeds bound " + num(bound) +
                      " = " + params.bound_label + " (opnorm = " + num(params.opnorm) + ")");
}

PdfpParams resolve_params(const CompositeProblem& problem, Scheme scheme,
                          std::optional<double> gamma, std::optional<double> lambda) {
  problem.validate();
  const double gram = gram_max_eigenvalue(*problem.d);
  PdfpParams p;
  if (scheme == Scheme::Spdfp2o) {
    p.opnorm = gram + 1.0;
    p.bound_label = "1/(lambda_max(DD^T)+1)";
  } else {
    p.opnorm = gram;
    p.bound_label = "1/lambda_max(DD^T)";
  }
  p.gamma = gamma.value_or(1.0 / problem.f->lipschitz());
  p.lambda = lambda.value_or(1.0 / p.opnorm);
  validate_params(problem, p);
  return p;
}

SolverState zero_state(const CompositeProblem& problem) {
  return SolverState{Vec(problem.dual_dim(), 0.0), Vec(problem.primal_dim(), 0.0),
                     Vec(problem.primal_dim(), 0.0)};
}

SolverState pdfp2o_step(const SolverState& s, const CompositeProblem& problem,
                        const PdfpParams& params) {
  if (!problem.g.is_zero())
    throw ModeError("pdfp2o_step handles g = 0 only; use spdfp2o_step for " +
                    problem.g.describe());
  check_state(s, problem);
  const double gamma = params.gamma;
  const double lambda = params.lambda;
  const Vec xh = forward_step(problem, s.x, gamma);
  const Vec dtv = problem.d->adjoint(s.v);

  // D(x_half - lambda D^T v) + v == D x_half + (I - lambda D D^T) v
  Vec a(xh.size());
  kernels::lincomb(1.0, xh, -lambda, dtv, a);
  Vec z = problem.d->apply(a);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += s.v[i];

  SolverState out;
  out.v = problem.h.residual(z, gamma / lambda);
  out.y.assign(s.x.size(), 0.0);
  const Vec dtv_new = problem.d->adjoint(out.v);
  out.x.resize(xh.size());
  kernels::lincomb(1.0, xh, -lambda, dtv_new, out.x);
  return out;
}

SolverState spdfp2o_step(const SolverState& s, const CompositeProblem& problem,
                         const PdfpParams& params) {
  check_state(s, problem);
  const double gamma = params.gamma;
  const double lambda = params.lambda;
  const double scale = gamma / lambda;
  const Vec xh = forward_step(problem, s.x, gamma);
  const Vec dtv = problem.d->adjoint(s.v);

  // D x_half + (I - lambda D D^T) v - lambda D y == D(x_half - lambda (D^T v + y)) + v
  Vec t(xh.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = dtv[i] + s.y[i];
  Vec a(xh.size());
  kernels::lincomb(1.0, xh, -lambda, t, a);
  Vec z = problem.d->apply(a);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += s.v[i];

  Vec w(xh.size());
  kernels::lincomb(1.0, xh, -lambda, dtv, w);
  kernels::axpy(1.0 - lambda, s.y, w);

  SolverState out;
  out.v = problem.h.residual(z, scale);
  out.y = problem.g.residual(w, scale);
  const Vec dtv_new = problem.d->adjoint(out.v);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = dtv_new[i] + out.y[i];
  out.x.resize(xh.size());
  kernels::lincomb(1.0, xh, -lambda, t, out.x);
  return out;
}

SolverState step(Scheme scheme, const SolverState& s, const CompositeProblem& problem,
                 const PdfpParams& params) {
  return scheme == Scheme::Pdfp2o ? pdfp2o_step(s, problem, params)
                                  : spdfp2o_step(s, problem, params);
}

Vec pack_state(const SolverState& s) {
  Vec u;
  u.reserve(s.v.size() + s.y.size() + s.x.size());
  u.insert(u.end(), s.v.begin(), s.v.end());
  u.insert(u.end(), s.y.begin(), s.y.end());
  u.insert(u.end(), s.x.begin(), s.x.end());
  return u;
}

SolverState unpack_state(std::span<const double> u, const CompositeProblem& problem) {
  const std::size_t nv = problem.dual_dim();
  const std::size_t nx = problem.primal_dim();
  if (u.size() != nv + 2 * nx) throw ShapeError("unpack_state: size mismatch");
  SolverState s;
  s.v.assign(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(nv));
  s.y.assign(u.begin() + static_cast<std::ptrdiff_t>(nv),
             u.begin() + static_cast<std::ptrdiff_t>(nv + nx));
  s.x.assign(u.begin() + static_cast<std::ptrdiff_t>(nv + nx), u.end());
  return s;
}

Vec lambda_weights(const CompositeProblem& problem, double lambda) {
  Vec w(problem.dual_dim() + 2 * problem.primal_dim(), 1.0);
  for (std::size_t i = 0; i < problem.dual_dim() + problem.primal_dim(); ++i) w[i] = lambda;
  return w;
}

double state_lambda_norm(const SolverState& s, double lambda) {
  return std::sqrt(kernels::squared_norm(s.x) +
                   lambda * (kernels::squared_norm(s.v) + kernels::squared_norm(s.y)));
}

double state_lambda_distance(const SolverState& a, const SolverState& b, double lambda) {
  return state_lambda_norm(SolverState{sub(a.v, b.v), sub(a.y, b.y), sub(a.x, b.x)}, lambda);
}

BlockOperator as_fixed_point_operator(const CompositeProblem& problem, const PdfpParams& params,
                                      std::vector<std::vector<std::size_t>> blocks) {
  validate_params(problem, params);
  const std::size_t nv = problem.dual_dim();
  const std::size_t nx = problem.primal_dim();
  if (blocks.empty()) {
    blocks.resize(3);
    for (std::size_t i = 0; i < nv; ++i) blocks[0].push_back(i);
    for (std::size_t i = 0; i < nx; ++i) blocks[1].push_back(nv + i);
    for (std::size_t i = 0; i < nx; ++i) blocks[2].push_back(nv + nx + i);
  }
  auto map = [problem, params](std::span<const double> u) {
    return pack_state(spdfp2o_step(unpack_state(u, problem), problem, params));
  };
  return BlockOperator(nv + 2 * nx, std::move(map), std::move(blocks),
                       lambda_weights(problem, params.lambda));
}

SolveResult solve(const CompositeProblem& problem, const PdfpParams& params,
                  const SolverState& init, const SolveOptions& opts) {
  validate_params(problem, params);
  check_state(init, problem);
  if (opts.scheme == Scheme::Pdfp2o && !problem.g.is_zero())
    throw ModeError("pdfp2o requires g = 0");
  const std::size_t log_every = opts.log_every == 0 ? 1 : opts.log_every;

  SolveResult res;
  res.state = init;
  const double init_norm = state_lambda_norm(init, params.lambda);
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t k = 1; k <= opts.stop.max_iter; ++k) {
    SolverState next = step(opts.scheme, res.state, problem, params);
    const double r = state_lambda_distance(next, res.state, params.lambda);
    res.state = std::move(next);
    res.iterations = k;
    res.final_residual = r;
    const double nrm = state_lambda_norm(res.state, params.lambda);
    if (!std::isfinite(nrm) || nrm > opts.divergence_factor * (1.0 + init_norm))
      throw DivergenceError("iterates diverged at iteration " + std::to_string(k) +
                            " (||u|| = " + num(nrm) + "); check the step sizes");
    const bool done = r <= opts.stop.tol;
    if (k % log_every == 0 || done || k == opts.stop.max_iter) {
      TraceRecord rec;
      rec.iter = k;
      rec.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      rec.objective = problem.objective(res.state.x);
      rec.fp_residual = r;
      rec.consensus_residual = std::numeric_limits<double>::quiet_NaN();
      res.trace.push_back(std::move(rec));
    }
    if (done) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace pdfp
