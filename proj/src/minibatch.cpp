#include "pdfp/minibatch.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "pdfp/errors.hpp"
#include "pdfp/kernels.hpp"

namespace pdfp {
namespace {

constexpr double kMeanDualTolerance = 1e-12;

void check_state(const MinibatchState& s, const BatchedProblem& b) {
  const std::size_t n = b.batches();
  if (s.v.size() != n || s.y.size() != n || s.x.size() != n)
    throw ShapeError("minibatch state does not have one triple per batch");
  for (std::size_t i = 0; i < n; ++i)
    if (s.v[i].size() != b.dim || s.y[i].size() != b.dim || s.x[i].size() != b.dim)
      throw ShapeError("minibatch state block has the wrong dimension");
}

Vec mean_of(const std::vector<Vec>& blocks) {
  Vec m(blocks.front().size(), 0.0);
  for (const Vec& b : blocks)
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += b[i];
  const double inv = 1.0 / static_cast<double>(blocks.size());
  for (double& e : m) e *= inv;
  return m;
}

// Per-batch quantities that only change when the batch itself is updated.
struct BatchCache {
  Vec xh;            // x_n - gamma grad f_n(x_n)
  Vec contribution;  // x_half_n - lambda y_n
};

BatchCache make_cache(const BatchedProblem& b, const MinibatchState& s, std::size_t n,
                      double gamma, double lambda) {
  BatchCache c;
  const Vec grad = b.f[n]->gradient(s.x[n]);
  c.xh.resize(b.dim);
  kernels::lincomb(1.0, s.x[n], -gamma, grad, c.xh);
  c.contribution.resize(b.dim);
  kernels::lincomb(1.0, c.xh, -lambda, s.y[n], c.contribution);
  return c;
}

struct BatchOutput {
  Vec v;
  Vec y;
  Vec x;
};

// Block n of the lifted operator given the subtracted aggregate.
BatchOutput batch_update(const BatchedProblem& b, const MinibatchState& s, std::size_t n,
                         const Vec& xh, const Vec& aggregate, const PdfpParams& p) {
  const double lambda = p.lambda;
  BatchOutput out;
  // x_half + (1 - lambda) v - lambda y - aggregate
  out.v.resize(b.dim);
  kernels::lincomb(1.0, xh, -lambda, s.y[n], out.v);
  kernels::axpy(1.0 - lambda, s.v[n], out.v);
  for (std::size_t i = 0; i < b.dim; ++i) out.v[i] -= aggregate[i];

  Vec w(b.dim);
  kernels::lincomb(1.0, xh, -lambda, s.v[n], w);
  kernels::axpy(1.0 - lambda, s.y[n], w);
  out.y = b.g[n].residual(w, p.gamma / lambda);

  Vec t(b.dim);
  for (std::size_t i = 0; i < b.dim; ++i) t[i] = out.v[i] + out.y[i];
  out.x.resize(b.dim);
  kernels::lincomb(1.0, xh, -lambda, t, out.x);
  return out;
}

// s + (1 - lambda) mean(v)
Vec projected_mean(const Vec& s_mean, const Vec& v_mean, double lambda) {
  Vec agg(s_mean);
  kernels::axpy(1.0 - lambda, v_mean, agg);
  return agg;
}

}  // namespace

double BatchedProblem::lipschitz() const {
  if (common_lipschitz > 0.0) return common_lipschitz;
  double l = 0.0;
  for (const auto& fn : f) l = std::max(l, fn->lipschitz());
  return l;
}

void BatchedProblem::validate() const {
  if (f.empty()) throw ParameterError("batched problem needs at least one batch");
  if (g.size() != f.size()) throw ShapeError("batched problem: |f| != |g|");
  if (dim == 0) throw ShapeError("batched problem: zero dimension");
  for (const auto& fn : f) {
    if (!fn) throw ShapeError("batched problem: missing f_n");
    if (fn->dim() != dim) throw ShapeError("batched problem: f_n dimension mismatch");
  }
}

double BatchedProblem::objective(std::span<const double> x) const {
  double total = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) total += f[n]->value(x) + g[n].value(x);
  return total;
}

Vec MinibatchState::mean_x() const { return mean_of(x); }
Vec MinibatchState::mean_v() const { return mean_of(v); }

double MinibatchState::consensus_residual() const {
  const Vec m = mean_x();
  double r = 0.0;
  for (const Vec& b : x) r = std::max(r, distance(b, m));
  return r;
}

MinibatchState zero_minibatch_state(const BatchedProblem& batched) {
  batched.validate();
  const std::vector<Vec> zeros(batched.batches(), Vec(batched.dim, 0.0));
  return MinibatchState{zeros, zeros, zeros};
}

CompositeProblem lift_problem(const BatchedProblem& batched) {
  batched.validate();
  const std::size_t n = batched.batches();
  CompositeProblem p;
  p.f = std::make_shared<WithLipschitz>(std::make_shared<SeparableSum>(batched.f),
                                        batched.lipschitz());
  p.g = ProxFn::block_separable(batched.g, batched.dim);
  p.h = ProxFn::consensus(n, batched.dim);
  p.d = std::make_shared<IdentityMap>(n * batched.dim);
  return p;
}

PdfpParams resolve_minibatch_params(const BatchedProblem& batched, std::optional<double> gamma,
                                    std::optional<double> lambda) {
  return resolve_params(lift_problem(batched), Scheme::Spdfp2o, gamma, lambda);
}

SolverState to_lifted(const MinibatchState& s) {
  SolverState out;
  for (const Vec& b : s.v) out.v.insert(out.v.end(), b.begin(), b.end());
  for (const Vec& b : s.y) out.y.insert(out.y.end(), b.begin(), b.end());
  for (const Vec& b : s.x) out.x.insert(out.x.end(), b.begin(), b.end());
  return out;
}

MinibatchState from_lifted(const SolverState& s, std::size_t batches) {
  if (batches == 0 || s.x.size() % batches != 0 || s.v.size() != s.x.size() ||
      s.y.size() != s.x.size())
    throw ShapeError("from_lifted: state does not split into batches");
  const std::size_t q = s.x.size() / batches;
  MinibatchState out;
  auto split = [&](const Vec& flat, std::vector<Vec>& dst) {
    for (std::size_t n = 0; n < batches; ++n)
      dst.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(n * q),
                       flat.begin() + static_cast<std::ptrdiff_t>((n + 1) * q));
  };
  split(s.v, out.v);
  split(s.y, out.y);
  split(s.x, out.x);
  return out;
}

std::vector<std::vector<std::size_t>> minibatch_blocks(const BatchedProblem& batched) {
  const std::size_t n = batched.batches();
  const std::size_t q = batched.dim;
  const std::size_t total = n * q;
  std::vector<std::vector<std::size_t>> blocks(n);
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t part = 0; part < 3; ++part)
      for (std::size_t i = 0; i < q; ++i) blocks[b].push_back(part * total + b * q + i);
  return blocks;
}

Vec aggregate_s(const MinibatchState& s, const BatchedProblem& batched, double gamma,
                double lambda) {
  check_state(s, batched);
  std::vector<Vec> contributions;
  for (std::size_t n = 0; n < batched.batches(); ++n)
    contributions.push_back(make_cache(batched, s, n, gamma, lambda).contribution);
  return mean_of(contributions);
}

MinibatchState minibatch_step(const MinibatchState& s, const BatchedProblem& batched,
                              const PdfpParams& params) {
  check_state(s, batched);
  if (norm_inf(s.mean_v()) > kMeanDualTolerance)
    throw ConfigError("minibatch sweep requires the duals to average to zero (mean |v| = " +
                      std::to_string(norm_inf(s.mean_v())) + ")");
  const std::size_t n = batched.batches();
  std::vector<BatchCache> cache;
  std::vector<Vec> contributions;
  for (std::size_t b = 0; b < n; ++b) {
    cache.push_back(make_cache(batched, s, b, params.gamma, params.lambda));
    contributions.push_back(cache.back().contribution);
  }
  const Vec agg = mean_of(contributions);
  MinibatchState out = s;
  for (std::size_t b = 0; b < n; ++b) {
    BatchOutput o = batch_update(batched, s, b, cache[b].xh, agg, params);
    out.v[b] = std::move(o.v);
    out.y[b] = std::move(o.y);
    out.x[b] = std::move(o.x);
  }
  return out;
}

MinibatchState smspdfp2o_step(const MinibatchState& s, const BatchedProblem& batched,
                              const PdfpParams& params, std::size_t zeta) {
  check_state(s, batched);
  if (zeta >= batched.batches())
    throw ParameterError("batch index " + std::to_string(zeta) + " out of range (N = " +
                         std::to_string(batched.batches()) + ")");
  std::vector<Vec> contributions;
  Vec xh_zeta;
  for (std::size_t b = 0; b < batched.batches(); ++b) {
    BatchCache c = make_cache(batched, s, b, params.gamma, params.lambda);
    if (b == zeta) xh_zeta = c.xh;
    contributions.push_back(std::move(c.contribution));
  }
  const Vec agg = projected_mean(mean_of(contributions), s.mean_v(), params.lambda);
  BatchOutput o = batch_update(batched, s, zeta, xh_zeta, agg, params);
  MinibatchState out = s;
  out.v[zeta] = std::move(o.v);
  out.y[zeta] = std::move(o.y);
  out.x[zeta] = std::move(o.x);
  return out;
}

StochasticResult run_stochastic(const BatchedProblem& batched, const PdfpParams& params,
                                const MinibatchState& init, CoordinateSampler& sampler,
                                const StochasticOptions& opts) {
  batched.validate();
  check_state(init, batched);
  validate_params(lift_problem(batched), params);
  const std::size_t n = batched.batches();
  const std::size_t q = batched.dim;
  if (sampler.block_count() != n)
    throw ConfigError("sampler covers " + std::to_string(sampler.block_count()) +
                      " batches, problem has " + std::to_string(n));
  for (std::size_t b = 0; b < n; ++b)
    if (!(sampler.inclusion_probability(b) > 0.0))
      throw ConfigError("batch " + std::to_string(b) + " has zero selection probability");

  const std::size_t log_every = opts.log_every == 0 ? 1 : opts.log_every;
  const double inv_n = 1.0 / static_cast<double>(n);
  StochasticResult res;
  res.state = init;
  MinibatchState& s = res.state;

  std::vector<BatchCache> cache;
  for (std::size_t b = 0; b < n; ++b)
    cache.push_back(make_cache(batched, s, b, params.gamma, params.lambda));
  Vec sum_contrib(q, 0.0);
  Vec sum_v(q, 0.0);
  auto resum = [&] {
    std::fill(sum_contrib.begin(), sum_contrib.end(), 0.0);
    std::fill(sum_v.begin(), sum_v.end(), 0.0);
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t i = 0; i < q; ++i) {
        sum_contrib[i] += cache[b].contribution[i];
        sum_v[i] += s.v[b][i];
      }
  };
  resum();

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::size_t> last_active;
  std::vector<BatchOutput> outputs(n);
  for (std::size_t k = 0;; ++k) {
    Vec s_mean(q), v_mean(q);
    for (std::size_t i = 0; i < q; ++i) {
      s_mean[i] = sum_contrib[i] * inv_n;
      v_mean[i] = sum_v[i] * inv_n;
    }
    const Vec agg = projected_mean(s_mean, v_mean, params.lambda);
    double r2 = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      outputs[b] = batch_update(batched, s, b, cache[b].xh, agg, params);
      for (std::size_t i = 0; i < q; ++i) {
        const double dv = outputs[b].v[i] - s.v[b][i];
        const double dy = outputs[b].y[i] - s.y[b][i];
        const double dx = outputs[b].x[i] - s.x[b][i];
        r2 += dx * dx + params.lambda * (dv * dv + dy * dy);
      }
    }
    const double r = std::sqrt(r2);
    res.final_residual = r;
    const bool done = r <= opts.stop.tol;
    if (k > 0 && (k % log_every == 0 || done || k == opts.stop.max_iter)) {
      TraceRecord rec;
      rec.iter = k;
      rec.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const Vec xbar = s.mean_x();
      rec.objective = batched.objective(xbar);
      rec.fp_residual = r;
      rec.consensus_residual = s.consensus_residual();
      rec.active_set = last_active;
      res.trace.push_back(std::move(rec));
    }
    if (done) {
      res.converged = true;
      break;
    }
    if (k == opts.stop.max_iter) break;

    last_active = sampler.sample();
    for (std::size_t b : last_active) {
      const Vec old_contrib = cache[b].contribution;
      const Vec old_v = s.v[b];
      s.v[b] = std::move(outputs[b].v);
      s.y[b] = std::move(outputs[b].y);
      s.x[b] = std::move(outputs[b].x);
      cache[b] = make_cache(batched, s, b, params.gamma, params.lambda);
      if (opts.incremental_aggregates) {
        for (std::size_t i = 0; i < q; ++i) {
          sum_contrib[i] += cache[b].contribution[i] - old_contrib[i];
          sum_v[i] += s.v[b][i] - old_v[i];
        }
      }
    }
    if (!opts.incremental_aggregates) resum();
    res.iterations = k + 1;
    if (!std::isfinite(r)) throw DivergenceError("stochastic minibatch iterates diverged");
  }
  return res;
}

}  // namespace pdfp
