#pragma once

// Concrete problems: LASSO and l1-regularized logistic regression, their
// batched forms, dataset partitioning and synthetic data.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pdfp/linalg.hpp"
#include "pdfp/minibatch.hpp"
#include "pdfp/pdfp.hpp"
#include "pdfp/smooth.hpp"

namespace pdfp {

enum class LossKind { Quadratic, Logistic };

struct Dataset {
  FeatureMatrix features;
  Vec labels;  // targets (quadratic) or classes in {-1, +1} (logistic)

  std::size_t m() const { return features.rows(); }
  std::size_t q() const { return features.cols(); }
  // Shape, finiteness and (for logistic) label checks.
  void validate(LossKind kind) const;
};

using DatasetPtr = std::shared_ptr<const Dataset>;

struct Partition {
  std::vector<std::vector<std::size_t>> blocks;  // 0-based sample ids

  std::size_t size() const { return blocks.size(); }
  // Throws PartitionError unless the blocks are non-empty, disjoint and cover [0, m).
  void validate(std::size_t m) const;
};

enum class PartitionStrategy { Contiguous, Strided, SeededRandom };

Partition partition_dataset(std::size_t m, std::size_t n, PartitionStrategy strategy,
                            std::uint64_t seed = 0);

struct ValueGrad {
  double value = 0.0;
  Vec grad;
};

// sum_{i in indices} (1/m) log(1 + exp(-y_i a_i^T x)) and its gradient.
ValueGrad logistic_value_grad(std::span<const double> x, const Dataset& data,
                              std::span<const std::size_t> indices);
// (1/2 ||A x - b||^2, A^T (A x - b))
ValueGrad quadratic_value_grad(std::span<const double> x, const DenseMatrix& a,
                               std::span<const double> b);

// Quadratic: lambda_max(A^T A). Logistic: lambda_max(A^T A) / (4 m).
double lipschitz_estimate(const FeatureMatrix& a, LossKind kind, std::size_t m);

// Logistic loss restricted to a subset of the samples, normalized by the
// full sample count m.
class LogisticLoss final : public SmoothFn {
 public:
  LogisticLoss(DatasetPtr data, std::vector<std::size_t> indices, double lipschitz);
  // All samples; L from lipschitz_estimate.
  explicit LogisticLoss(DatasetPtr data);
  std::size_t dim() const override { return data_->q(); }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> out) const override;
  double lipschitz() const override { return lipschitz_; }
  std::string describe() const override;

 private:
  DatasetPtr data_;
  std::vector<std::size_t> indices_;
  double lipschitz_;
};

// f = 1/2 ||A x - b||^2, g = 0, h = tau ||.||_1, D = identity (or `d`).
CompositeProblem build_lasso(DenseMatrix a, Vec b, double tau, LinearMapPtr d = nullptr);
// Centralized l1-logistic: f = full logistic loss, g = 0, h = tau ||.||_1, D = identity.
CompositeProblem build_logistic(DatasetPtr data, double tau);
// Batch n: f_n = logistic loss over block n (1/m normalization), g_n = (tau/N) ||.||_1,
// all batches sharing the global Lipschitz bound.
BatchedProblem build_batched_logistic(DatasetPtr data, const Partition& partition, double tau);
// Batch n: f_n = 1/2 ||A_n x - b_n||^2, g_n = (tau/N) ||.||_1, common L of the full A.
BatchedProblem build_batched_lasso(DatasetPtr data, const Partition& partition, double tau);

struct SyntheticSpec {
  LossKind kind = LossKind::Quadratic;
  std::uint64_t seed = 1;
  std::size_t m = 50;
  std::size_t q = 20;
  double sparsity = 0.25;
  double noise = 0.0;
};

struct SyntheticData {
  SyntheticSpec spec;
  Dataset data;
  Vec ground_truth;
};

// Standard normal dense features, a ceil(sparsity q)-sparse +-1 ground truth,
// and targets A x + noise * N(0,1) (quadratic) or labels
// sign(a_i^T x + noise * N(0,1)) with sign(0) = +1 (logistic).
SyntheticData generate_synthetic(const SyntheticSpec& spec);

}  // namespace pdfp
