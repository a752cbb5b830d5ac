#include "pdfp/prox.hpp"

#include <cmath>
#include <limits>

#include "pdfp/errors.hpp"
#include "pdfp/kernels.hpp"

namespace pdfp {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_scale(double scale) {
  if (!(scale > 0.0)) throw ParameterError("prox scale must be positive");
}

void check_blocks(std::size_t n, std::size_t block_dim, std::size_t blocks) {
  if (block_dim == 0 || n != block_dim * blocks)
    throw ShapeError("vector of size " + std::to_string(n) +
                     " does not split into " + std::to_string(blocks) +
                     " blocks of " + std::to_string(block_dim));
}

// Mean of the `blocks` blocks of x.
Vec block_mean(std::span<const double> x, std::size_t blocks, std::size_t dim) {
  Vec mean(dim, 0.0);
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t i = 0; i < dim; ++i) mean[i] += x[b * dim + i];
  const double inv = 1.0 / static_cast<double>(blocks);
  for (double& m : mean) m *= inv;
  return mean;
}

}  // namespace

Vec soft_threshold(std::span<const double> x, double tau) {
  if (tau < 0.0 || std::isnan(tau))
    throw ParameterError("soft_threshold: tau must be nonnegative");
  Vec out(x.size());
  kernels::soft_threshold(x, tau, out);
  return out;
}

std::pair<Vec, Vec> project_pair_consensus(std::span<const double> a,
                                           std::span<const double> b) {
  if (a.size() != b.size())
    throw ShapeError("project_pair_consensus: slot dimensions differ");
  Vec avg(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) avg[i] = 0.5 * (a[i] + b[i]);
  return {avg, avg};
}

std::vector<Vec> project_consensus(const std::vector<Vec>& blocks) {
  if (blocks.empty()) throw ParameterError("project_consensus: no blocks");
  const std::size_t dim = blocks.front().size();
  Vec flat;
  flat.reserve(blocks.size() * dim);
  for (const Vec& b : blocks) {
    if (b.size() != dim) throw ShapeError("project_consensus: block sizes differ");
    flat.insert(flat.end(), b.begin(), b.end());
  }
  return std::vector<Vec>(blocks.size(), block_mean(flat, blocks.size(), dim));
}

double lambda_norm(std::span<const double> v, std::span<const double> x,
                   double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("lambda_norm: lambda must be positive");
  return std::sqrt(kernels::squared_norm(x) + lambda * kernels::squared_norm(v));
}

double lambda_norm(const ProductPoint& u, double lambda) {
  return lambda_norm(u.v, u.x, lambda);
}

ProxFn ProxFn::l1(double weight) {
  if (weight < 0.0 || std::isnan(weight))
    throw ParameterError("l1 weight must be nonnegative");
  return ProxFn(L1{weight});
}

ProxFn ProxFn::consensus(std::size_t blocks, std::size_t block_dim) {
  if (blocks == 0) throw ParameterError("consensus indicator needs at least one block");
  if (block_dim == 0) throw ShapeError("consensus indicator: zero block dimension");
  return ProxFn(Consensus{blocks, block_dim});
}

ProxFn ProxFn::pair_consensus(std::size_t block_dim) {
  if (block_dim == 0) throw ShapeError("pair consensus indicator: zero block dimension");
  return ProxFn(PairConsensus{block_dim});
}

ProxFn ProxFn::block_separable(std::vector<ProxFn> parts, std::size_t block_dim) {
  if (parts.empty()) throw ParameterError("block_separable: no parts");
  if (block_dim == 0) throw ShapeError("block_separable: zero block dimension");
  return ProxFn(BlockSeparable{
      std::make_shared<const std::vector<ProxFn>>(std::move(parts)), block_dim});
}

Vec ProxFn::prox(std::span<const double> x, double scale) const {
  check_scale(scale);
  return std::visit(
      Overloaded{
          [&](const Zero&) { return Vec(x.begin(), x.end()); },
          [&](const L1& l) { return soft_threshold(x, scale * l.weight); },
          [&](const Consensus& c) {
            check_blocks(x.size(), c.block_dim, c.blocks);
            const Vec mean = block_mean(x, c.blocks, c.block_dim);
            Vec out(x.size());
            for (std::size_t b = 0; b < c.blocks; ++b)
              std::copy(mean.begin(), mean.end(), out.begin() + b * c.block_dim);
            return out;
          },
          [&](const PairConsensus& p) {
            if (x.size() % (2 * p.block_dim) != 0)
              throw ShapeError("pair consensus: size is not a multiple of 2*block_dim");
            Vec out(x.size());
            const std::size_t d = p.block_dim;
            for (std::size_t e = 0; e < x.size(); e += 2 * d)
              for (std::size_t i = 0; i < d; ++i) {
                const double avg = 0.5 * (x[e + i] + x[e + d + i]);
                out[e + i] = avg;
                out[e + d + i] = avg;
              }
            return out;
          },
          [&](const BlockSeparable& s) {
            check_blocks(x.size(), s.block_dim, s.parts->size());
            Vec out(x.size());
            for (std::size_t b = 0; b < s.parts->size(); ++b) {
              const Vec part =
                  (*s.parts)[b].prox(x.subspan(b * s.block_dim, s.block_dim), scale);
              std::copy(part.begin(), part.end(), out.begin() + b * s.block_dim);
            }
            return out;
          },
      },
      kind_);
}

Vec ProxFn::residual(std::span<const double> x, double scale) const {
  check_scale(scale);
  return std::visit(
      Overloaded{
          [&](const Zero&) { return Vec(x.size(), 0.0); },
          [&](const PairConsensus& p) {
            if (x.size() % (2 * p.block_dim) != 0)
              throw ShapeError("pair consensus: size is not a multiple of 2*block_dim");
            // ((a - b)/2, (b - a)/2), exactly antisymmetric.
            Vec out(x.size());
            const std::size_t d = p.block_dim;
            for (std::size_t e = 0; e < x.size(); e += 2 * d)
              for (std::size_t i = 0; i < d; ++i) {
                const double half = 0.5 * (x[e + i] - x[e + d + i]);
                out[e + i] = half;
                out[e + d + i] = -half;
              }
            return out;
          },
          [&](const BlockSeparable& s) {
            check_blocks(x.size(), s.block_dim, s.parts->size());
            Vec out(x.size());
            for (std::size_t b = 0; b < s.parts->size(); ++b) {
              const Vec part = (*s.parts)[b].residual(
                  x.subspan(b * s.block_dim, s.block_dim), scale);
              std::copy(part.begin(), part.end(), out.begin() + b * s.block_dim);
            }
            return out;
          },
          [&](const auto&) {
            Vec p = prox(x, scale);
            for (std::size_t i = 0; i < x.size(); ++i) p[i] = x[i] - p[i];
            return p;
          },
      },
      kind_);
}

double ProxFn::value(std::span<const double> x) const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(
      Overloaded{
          [&](const Zero&) { return 0.0; },
          [&](const L1& l) {
            double s = 0.0;
            for (double v : x) s += std::abs(v);
            return l.weight * s;
          },
          [&](const Consensus& c) {
            check_blocks(x.size(), c.block_dim, c.blocks);
            for (std::size_t b = 1; b < c.blocks; ++b)
              for (std::size_t i = 0; i < c.block_dim; ++i)
                if (std::abs(x[b * c.block_dim + i] - x[i]) > kIndicatorTolerance)
                  return inf;
            return 0.0;
          },
          [&](const PairConsensus& p) {
            const std::size_t d = p.block_dim;
            if (x.size() % (2 * d) != 0)
              throw ShapeError("pair consensus: size is not a multiple of 2*block_dim");
            for (std::size_t e = 0; e < x.size(); e += 2 * d)
              for (std::size_t i = 0; i < d; ++i)
                if (std::abs(x[e + i] - x[e + d + i]) > kIndicatorTolerance) return inf;
            return 0.0;
          },
          [&](const BlockSeparable& s) {
            check_blocks(x.size(), s.block_dim, s.parts->size());
            double total = 0.0;
            for (std::size_t b = 0; b < s.parts->size(); ++b)
              total += (*s.parts)[b].value(x.subspan(b * s.block_dim, s.block_dim));
            return total;
          },
      },
      kind_);
}

bool ProxFn::is_zero() const {
  if (std::holds_alternative<Zero>(kind_)) return true;
  if (const auto* l = std::get_if<L1>(&kind_)) return l->weight == 0.0;
  if (const auto* s = std::get_if<BlockSeparable>(&kind_)) {
    for (const ProxFn& p : *s->parts)
      if (!p.is_zero()) return false;
    return true;
  }
  return false;
}

bool ProxFn::is_indicator() const {
  return std::holds_alternative<Consensus>(kind_) ||
         std::holds_alternative<PairConsensus>(kind_);
}

std::string ProxFn::describe() const {
  return std::visit(
      Overloaded{
          [](const Zero&) { return std::string("zero"); },
          [](const L1& l) { return "l1(" + std::to_string(l.weight) + ")"; },
          [](const Consensus& c) {
            return "consensus(" + std::to_string(c.blocks) + "x" +
                   std::to_string(c.block_dim) + ")";
          },
          [](const PairConsensus& p) {
            return "pair_consensus(" + std::to_string(p.block_dim) + ")";
          },
          [](const BlockSeparable& s) {
            return "separable(" + std::to_string(s.parts->size()) + " blocks)";
          },
      },
      kind_);
}

}  // namespace pdfp
