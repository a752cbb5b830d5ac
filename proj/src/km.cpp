#include "pdfp/km.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pdfp/errors.hpp"

namespace pdfp {

BlockOperator::BlockOperator(std::size_t dim, Map map,
                             std::vector<std::vector<std::size_t>> blocks,
                             Vec norm_weights)
    : dim_(dim), map_(std::move(map)), blocks_(std::move(blocks)), weights_(std::move(norm_weights)) {
  if (!map_) throw ParameterError("BlockOperator: empty map");
  if (blocks_.empty()) throw ParameterError("BlockOperator: no blocks");
  if (!weights_.empty() && weights_.size() != dim_)
    throw ShapeError("BlockOperator: norm weights do not match dimension");
  std::vector<char> seen(dim_, 0);
  std::size_t covered = 0;
  for (const auto& b : blocks_) {
    if (b.empty()) throw ParameterError("BlockOperator: empty block");
    for (std::size_t i : b) {
      if (i >= dim_) throw ParameterError("BlockOperator: block index out of range");
      if (seen[i]) throw ParameterError("BlockOperator: blocks overlap");
      seen[i] = 1;
      ++covered;
    }
  }
  if (covered != dim_) throw ParameterError("BlockOperator: blocks do not cover the space");
}

BlockOperator BlockOperator::contiguous(std::size_t dim, Map map, std::size_t block_count,
                                        Vec norm_weights) {
  if (block_count == 0 || block_count > dim)
    throw ParameterError("BlockOperator: block count must be in [1, dim]");
  std::vector<std::vector<std::size_t>> blocks(block_count);
  const std::size_t base = dim / block_count;
  const std::size_t extra = dim % block_count;
  std::size_t next = 0;
  for (std::size_t j = 0; j < block_count; ++j) {
    const std::size_t len = base + (j < extra ? 1 : 0);
    for (std::size_t i = 0; i < len; ++i) blocks[j].push_back(next++);
  }
  return BlockOperator(dim, std::move(map), std::move(blocks), std::move(norm_weights));
}

Vec BlockOperator::apply(std::span<const double> x) const {
  if (x.size() != dim_) throw ShapeError("BlockOperator: dimension mismatch");
  Vec out = map_(x);
  if (out.size() != dim_) throw ShapeError("BlockOperator: map changed the dimension");
  return out;
}

Vec BlockOperator::apply_block(std::span<const double> x, std::size_t j) const {
  if (j >= blocks_.size()) throw ParameterError("BlockOperator: block index out of range");
  const Vec full = apply(x);
  Vec out;
  out.reserve(blocks_[j].size());
  for (std::size_t i : blocks_[j]) out.push_back(full[i]);
  return out;
}

double BlockOperator::norm(std::span<const double> d) const {
  if (d.size() != dim_) throw ShapeError("BlockOperator::norm: dimension mismatch");
  double s = 0.0;
  if (weights_.empty()) {
    for (double v : d) s += v * v;
  } else {
    for (std::size_t i = 0; i < d.size(); ++i) s += weights_[i] * d[i] * d[i];
  }
  return std::sqrt(s);
}

namespace {

void check_kappa(const BlockOperator& t, std::span<const std::size_t> kappa) {
  for (std::size_t j : kappa)
    if (j >= t.block_count())
      throw ParameterError("block index " + std::to_string(j) + " out of range (J = " +
                           std::to_string(t.block_count()) + ")");
}

}  // namespace

Vec masked_apply(const BlockOperator& t, std::span<const double> x,
                 std::span<const std::size_t> kappa) {
  check_kappa(t, kappa);
  Vec out(x.begin(), x.end());
  if (kappa.empty()) return out;
  const Vec tx = t.apply(x);
  for (std::size_t j : kappa)
    for (std::size_t i : t.block(j)) out[i] = tx[i];
  return out;
}

Vec km_step(const BlockOperator& t, std::span<const double> x, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw ParameterError("km_step: beta must lie in (0, 1]");
  const Vec tx = t.apply(x);
  if (beta == 1.0) return tx;
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + beta * (tx[i] - x[i]);
  return out;
}

double fixed_point_residual(const BlockOperator& t, std::span<const double> x) {
  const Vec tx = t.apply(x);
  return t.norm(sub(tx, x));
}

CoordinateSampler::CoordinateSampler(Mode mode, std::size_t blocks, std::uint64_t seed)
    : mode_(mode), blocks_(blocks), rng_(seed) {
  if (blocks_ == 0) throw ConfigError("sampler: block count must be positive");
}

CoordinateSampler CoordinateSampler::single_uniform(std::size_t blocks, std::uint64_t seed) {
  return CoordinateSampler(Mode::SingleUniform, blocks, seed);
}

CoordinateSampler CoordinateSampler::single_weighted(std::vector<double> weights,
                                                     std::uint64_t seed) {
  CoordinateSampler s(Mode::SingleWeighted, weights.size(), seed);
  for (std::size_t j = 0; j < weights.size(); ++j)
    if (!(weights[j] > 0.0) || !std::isfinite(weights[j]))
      throw ConfigError("sampler: block " + std::to_string(j) +
                        " has zero selection probability (every block needs a positive weight)");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= total;
  s.weights_ = std::move(weights);
  return s;
}

CoordinateSampler CoordinateSampler::independent(std::size_t blocks, double p,
                                                 std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0))
    throw ConfigError("sampler: inclusion probability must lie in (0, 1]");
  CoordinateSampler s(Mode::Independent, blocks, seed);
  s.p_ = p;
  return s;
}

CoordinateSampler CoordinateSampler::full(std::size_t blocks) {
  return CoordinateSampler(Mode::Full, blocks, 0);
}

std::vector<std::size_t> CoordinateSampler::sample() {
  std::vector<std::size_t> out;
  switch (mode_) {
    case Mode::SingleUniform: {
      std::uniform_int_distribution<std::size_t> pick(0, blocks_ - 1);
      out.push_back(pick(rng_));
      break;
    }
    case Mode::SingleWeighted: {
      std::discrete_distribution<std::size_t> pick(weights_.begin(), weights_.end());
      out.push_back(pick(rng_));
      break;
    }
    case Mode::Independent: {
      std::bernoulli_distribution coin(p_);
      for (std::size_t j = 0; j < blocks_; ++j)
        if (coin(rng_)) out.push_back(j);
      break;
    }
    case Mode::Full:
      out.resize(blocks_);
      std::iota(out.begin(), out.end(), std::size_t{0});
      break;
  }
  return out;
}

double CoordinateSampler::inclusion_probability(std::size_t j) const {
  if (j >= blocks_) throw ParameterError("sampler: block index out of range");
  switch (mode_) {
    case Mode::SingleUniform:
      return 1.0 / static_cast<double>(blocks_);
    case Mode::SingleWeighted:
      return weights_[j];
    case Mode::Independent:
      return p_;
    case Mode::Full:
      return 1.0;
  }
  return 0.0;
}

RelaxationSchedule RelaxationSchedule::constant(double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw ParameterError("relaxation: constant beta must lie in (0, 1); use paper_literal() for 1");
  return RelaxationSchedule([beta](std::size_t) { return beta; });
}

RelaxationSchedule RelaxationSchedule::paper_literal() {
  return RelaxationSchedule([](std::size_t) { return 1.0; });
}

RelaxationSchedule RelaxationSchedule::custom(std::function<double(std::size_t)> fn) {
  if (!fn) throw ParameterError("relaxation: empty schedule");
  return RelaxationSchedule(std::move(fn));
}

double RelaxationSchedule::at(std::size_t k) const {
  const double b = fn_(k);
  if (!(b > 0.0 && b <= 1.0))
    throw ParameterError("relaxation: beta_" + std::to_string(k) + " outside (0, 1]");
  return b;
}

KmResult randomized_km_run(const BlockOperator& t, std::span<const double> x0,
                           CoordinateSampler& sampler, const RelaxationSchedule& schedule,
                           const StoppingRule& stop) {
  if (sampler.block_count() != t.block_count())
    throw ConfigError("sampler block count does not match the operator");
  for (std::size_t j = 0; j < t.block_count(); ++j)
    if (!(sampler.inclusion_probability(j) > 0.0))
      throw ConfigError("sampler gives block " + std::to_string(j) + " zero probability");

  KmResult res;
  res.x.assign(x0.begin(), x0.end());
  for (std::size_t k = 0;; ++k) {
    const Vec tx = t.apply(res.x);
    const double r = t.norm(sub(tx, res.x));
    res.residuals.push_back(r);
    if (r <= stop.tol) {
      res.converged = true;
      break;
    }
    if (k == stop.max_iter) break;

    const double beta = schedule.at(k);
    const std::vector<std::size_t> kappa = sampler.sample();
    for (std::size_t j : kappa)
      for (std::size_t i : t.block(j))
        res.x[i] = beta == 1.0 ? tx[i] : res.x[i] + beta * (tx[i] - res.x[i]);
    res.iterations = k + 1;
    TraceRecord rec;
    rec.iter = k + 1;
    rec.objective = std::numeric_limits<double>::quiet_NaN();
    rec.fp_residual = r;
    rec.consensus_residual = std::numeric_limits<double>::quiet_NaN();
    rec.active_set = kappa;
    res.trace.push_back(std::move(rec));
  }
  return res;
}

}  // namespace pdfp
