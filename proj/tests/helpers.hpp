#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "pdfp/linalg.hpp"
#include "pdfp/problems.hpp"
#include "pdfp/smooth.hpp"

namespace testing {

using pdfp::DenseMatrix;
using pdfp::Vec;

inline Vec random_vec(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Vec v(n);
  for (double& e : v) e = d(rng);
  return v;
}

inline DenseMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  DenseMatrix a(r, c);
  std::normal_distribution<double> d(0.0, 1.0);
  for (double& e : a.data) e = d(rng);
  return a;
}

inline Eigen::MatrixXd to_eigen(const DenseMatrix& a) {
  Eigen::MatrixXd m(a.rows, a.cols);
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t c = 0; c < a.cols; ++c) m(r, c) = a(r, c);
  return m;
}

// Largest eigenvalue of A^T A from a dense symmetric eigendecomposition.
inline double eigen_gram_max(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.transpose() * a);
  return es.eigenvalues().maxCoeff();
}

// Least-squares solution from the normal equations A^T A x = A^T b.
inline Vec normal_equations(const DenseMatrix& a, const Vec& b) {
  const Eigen::MatrixXd m = to_eigen(a);
  const Eigen::VectorXd rhs = m.transpose() * Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
  const Eigen::VectorXd x = (m.transpose() * m).ldlt().solve(rhs);
  return Vec(x.data(), x.data() + x.size());
}

// Max over coordinates of |grad_i - central difference_i| / max(1, |grad|_inf).
inline double gradient_fd_error(const pdfp::SmoothFn& f, const Vec& x, double h = 1e-6) {
  const Vec g = f.gradient(x);
  double worst = 0.0, scale = 1.0;
  for (double e : g) scale = std::max(scale, std::abs(e));
  for (std::size_t i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (f.value(xp) - f.value(xm)) / (2 * h);
    worst = std::max(worst, std::abs(fd - g[i]) / scale);
  }
  return worst;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline pdfp::DatasetPtr logistic_data(std::uint64_t seed, std::size_t m, std::size_t q,
                                      double noise = 0.5) {
  pdfp::SyntheticSpec s;
  s.kind = pdfp::LossKind::Logistic;
  s.seed = seed;
  s.m = m;
  s.q = q;
  s.noise = noise;
  return std::make_shared<pdfp::Dataset>(pdfp::generate_synthetic(s).data);
}

inline pdfp::DatasetPtr lasso_data(std::uint64_t seed, std::size_t m, std::size_t q,
                                   double noise = 0.1) {
  pdfp::SyntheticSpec s;
  s.kind = pdfp::LossKind::Quadratic;
  s.seed = seed;
  s.m = m;
  s.q = q;
  s.noise = noise;
  return std::make_shared<pdfp::Dataset>(pdfp::generate_synthetic(s).data);
}

}  // namespace testing
