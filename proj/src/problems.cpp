#include "pdfp/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pdfp/errors.hpp"
#include "pdfp/kernels.hpp"
#include "pdfp/opnorm.hpp"

namespace pdfp {
namespace {

// log(1 + exp(-t)) without overflow for either sign of t.
double log1p_exp_neg(double t) {
  return t > 0.0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
}

// 1 / (1 + exp(t)) = sigma(-t)
double sigmoid_neg(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

void check_indices(std::span<const std::size_t> indices, std::size_t m) {
  for (std::size_t i : indices)
    if (i >= m)
      throw ParameterError("sample index " + std::to_string(i) + " out of range (m = " +
                           std::to_string(m) + ")");
}

}  // namespace

void Dataset::validate(LossKind kind) const {
  if (m() == 0 || q() == 0) throw ShapeError("dataset is empty");
  if (labels.size() != m())
    throw ShapeError("dataset has " + std::to_string(m()) + " rows but " +
                     std::to_string(labels.size()) + " labels");
  for (std::size_t r = 0; r < m(); ++r)
    features.for_each_in_row(r, [&](std::size_t, double v) {
      if (!std::isfinite(v))
        throw ParameterError("non-finite feature in row " + std::to_string(r));
    });
  for (std::size_t r = 0; r < m(); ++r) {
    if (!std::isfinite(labels[r]))
      throw ParameterError("non-finite label in row " + std::to_string(r));
    if (kind == LossKind::Logistic && labels[r] != 1.0 && labels[r] != -1.0)
      throw ParameterError("classification label " + std::to_string(labels[r]) + " in row " +
                           std::to_string(r) + " is not -1 or +1");
  }
}

void Partition::validate(std::size_t m) const {
  if (blocks.empty()) throw PartitionError("partition has no blocks");
  std::vector<bool> seen(m, false);
  std::size_t covered = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) throw PartitionError("block " + std::to_string(b) + " is empty");
    for (std::size_t i : blocks[b]) {
      if (i >= m) throw PartitionError("sample " + std::to_string(i) + " out of range");
      if (seen[i]) throw PartitionError("sample " + std::to_string(i) + " in two blocks");
      seen[i] = true;
      ++covered;
    }
  }
  if (covered != m) throw PartitionError("partition does not cover every sample");
}

Partition partition_dataset(std::size_t m, std::size_t n, PartitionStrategy strategy,
                            std::uint64_t seed) {
  if (n == 0) throw ParameterError("number of blocks must be positive");
  if (n > m)
    throw ParameterError("cannot split " + std::to_string(m) + " samples into " +
                         std::to_string(n) + " non-empty blocks");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  Partition p;
  p.blocks.resize(n);
  if (strategy == PartitionStrategy::Strided) {
    for (std::size_t i = 0; i < m; ++i) p.blocks[i % n].push_back(i);
    return p;
  }
  if (strategy == PartitionStrategy::SeededRandom) {
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  const std::size_t base = m / n;
  const std::size_t extra = m % n;
  std::size_t pos = 0;
  for (std::size_t b = 0; b < n; ++b) {
    const std::size_t len = base + (b < extra ? 1 : 0);
    p.blocks[b].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                       order.begin() + static_cast<std::ptrdiff_t>(pos + len));
    std::sort(p.blocks[b].begin(), p.blocks[b].end());
    pos += len;
  }
  return p;
}

ValueGrad logistic_value_grad(std::span<const double> x, const Dataset& data,
                              std::span<const std::size_t> indices) {
  if (x.size() != data.q()) throw ShapeError("logistic loss: dimension mismatch");
  check_indices(indices, data.m());
  const double inv_m = 1.0 / static_cast<double>(data.m());
  ValueGrad out;
  out.grad.assign(data.q(), 0.0);
  for (std::size_t i : indices) {
    const double y = data.labels[i];
    const double margin = y * data.features.row_dot(i, x);
    out.value += inv_m * log1p_exp_neg(margin);
    data.features.add_row(i, -inv_m * y * sigmoid_neg(margin), out.grad);
  }
  return out;
}

ValueGrad quadratic_value_grad(std::span<const double> x, const DenseMatrix& a,
                               std::span<const double> b) {
  if (x.size() != a.cols || b.size() != a.rows)
    throw ShapeError("quadratic loss: dimension mismatch");
  Vec r(a.rows);
  gemv(a, x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  ValueGrad out;
  out.value = 0.5 * kernels::squared_norm(r);
  out.grad.assign(a.cols, 0.0);
  gemv_t(a, r, out.grad);
  return out;
}

double lipschitz_estimate(const FeatureMatrix& a, LossKind kind, std::size_t m) {
  const double top =
      power_iteration_opnorm(MatrixMap(std::make_shared<const FeatureMatrix>(a)));
  if (kind == LossKind::Quadratic) return top;
  if (m == 0) throw ParameterError("logistic Lipschitz bound needs m > 0");
  return top / (4.0 * static_cast<double>(m));
}

LogisticLoss::LogisticLoss(DatasetPtr data, std::vector<std::size_t> indices, double lipschitz)
    : data_(std::move(data)), indices_(std::move(indices)), lipschitz_(lipschitz) {
  if (!data_) throw ShapeError("logistic loss needs a dataset");
  check_indices(indices_, data_->m());
  if (!(lipschitz_ > 0.0)) throw ParameterError("Lipschitz constant must be positive");
}

LogisticLoss::LogisticLoss(DatasetPtr data)
    : LogisticLoss(data, [&] {
        std::vector<std::size_t> all(data->m());
        std::iota(all.begin(), all.end(), 0);
        return all;
      }(),
                   lipschitz_estimate(data->features, LossKind::Logistic, data->m())) {}

double LogisticLoss::value(std::span<const double> x) const {
  if (x.size() != dim()) throw ShapeError("logistic loss: dimension mismatch");
  const double inv_m = 1.0 / static_cast<double>(data_->m());
  double v = 0.0;
  for (std::size_t i : indices_)
    v += inv_m * log1p_exp_neg(data_->labels[i] * data_->features.row_dot(i, x));
  return v;
}

void LogisticLoss::gradient(std::span<const double> x, std::span<double> out) const {
  if (x.size() != dim() || out.size() != dim())
    throw ShapeError("logistic loss: dimension mismatch");
  const double inv_m = 1.0 / static_cast<double>(data_->m());
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i : indices_) {
    const double y = data_->labels[i];
    const double margin = y * data_->features.row_dot(i, x);
    data_->features.add_row(i, -inv_m * y * sigmoid_neg(margin), out);
  }
}

std::string LogisticLoss::describe() const {
  return "logistic(" + std::to_string(indices_.size()) + "/" + std::to_string(data_->m()) +
         " samples, q=" + std::to_string(data_->q()) + ")";
}

CompositeProblem build_lasso(DenseMatrix a, Vec b, double tau, LinearMapPtr d) {
  if (!(tau >= 0.0)) throw ParameterError("tau must be non-negative");
  if (b.size() != a.rows) throw ShapeError("lasso: A and b disagree on the row count");
  const std::size_t q = a.cols;
  CompositeProblem p;
  p.f = std::make_shared<QuadraticLoss>(std::move(a), std::move(b));
  p.g = ProxFn::zero();
  p.h = ProxFn::l1(tau);
  p.d = d ? std::move(d) : std::make_shared<IdentityMap>(q);
  p.validate();
  return p;
}

CompositeProblem build_logistic(DatasetPtr data, double tau) {
  if (!(tau >= 0.0)) throw ParameterError("tau must be non-negative");
  data->validate(LossKind::Logistic);
  CompositeProblem p;
  p.f = std::make_shared<LogisticLoss>(data);
  p.g = ProxFn::zero();
  p.h = ProxFn::l1(tau);
  p.d = std::make_shared<IdentityMap>(data->q());
  return p;
}

BatchedProblem build_batched_logistic(DatasetPtr data, const Partition& partition, double tau) {
  if (!(tau >= 0.0)) throw ParameterError("tau must be non-negative");
  data->validate(LossKind::Logistic);
  partition.validate(data->m());
  const double l = lipschitz_estimate(data->features, LossKind::Logistic, data->m());
  const double share = tau / static_cast<double>(partition.size());
  BatchedProblem b;
  b.dim = data->q();
  b.common_lipschitz = l;
  for (const auto& block : partition.blocks) {
    b.f.push_back(std::make_shared<LogisticLoss>(data, block, l));
    b.g.push_back(ProxFn::l1(share));
  }
  return b;
}

BatchedProblem build_batched_lasso(DatasetPtr data, const Partition& partition, double tau) {
  if (!(tau >= 0.0)) throw ParameterError("tau must be non-negative");
  data->validate(LossKind::Quadratic);
  partition.validate(data->m());
  const double l = lipschitz_estimate(data->features, LossKind::Quadratic, data->m());
  const double share = tau / static_cast<double>(partition.size());
  BatchedProblem b;
  b.dim = data->q();
  b.common_lipschitz = l;
  for (const auto& block : partition.blocks) {
    Vec target;
    for (std::size_t i : block) target.push_back(data->labels[i]);
    b.f.push_back(
        std::make_shared<QuadraticLoss>(data->features.dense_rows(block), std::move(target), l));
    b.g.push_back(ProxFn::l1(share));
  }
  return b;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.m == 0 || spec.q == 0) throw ParameterError("m and q must be positive");
  if (!(spec.sparsity >= 0.0 && spec.sparsity <= 1.0))
    throw ParameterError("sparsity must lie in [0, 1]");
  if (!(spec.noise >= 0.0) || !std::isfinite(spec.noise))
    throw ParameterError("noise must be a finite non-negative number");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  DenseMatrix a(spec.m, spec.q);
  for (double& e : a.data) e = normal(rng);

  const auto k = static_cast<std::size_t>(std::ceil(spec.sparsity * static_cast<double>(spec.q)));
  std::vector<std::size_t> cols(spec.q);
  std::iota(cols.begin(), cols.end(), 0);
  std::shuffle(cols.begin(), cols.end(), rng);
  Vec truth(spec.q, 0.0);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t j = 0; j < std::min(k, spec.q); ++j) truth[cols[j]] = coin(rng) ? 1.0 : -1.0;

  Vec clean(spec.m);
  gemv(a, truth, clean);
  Vec labels(spec.m);
  for (std::size_t i = 0; i < spec.m; ++i) {
    const double t = clean[i] + spec.noise * normal(rng);
    labels[i] = spec.kind == LossKind::Quadratic ? t : (t >= 0.0 ? 1.0 : -1.0);
  }
  SyntheticData out;
  out.spec = spec;
  out.data.features = FeatureMatrix(std::move(a));
  out.data.labels = std::move(labels);
  out.ground_truth = std::move(truth);
  return out;
}

}  // namespace pdfp
