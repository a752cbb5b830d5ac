#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "pdfp/errors.hpp"
#include "pdfp/problems.hpp"
#include "pdfp/reference.hpp"

using namespace pdfp;

TEST_CASE("one-dimensional lasso") {
  DenseMatrix a(1, 1);
  a(0, 0) = 1.0;
  const QuadraticLoss f(a, Vec{2.0});
  const ReferenceResult r = solve_l1_reference(f, 1.0);
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.objective == doctest::Approx(1.5));
  CHECK(r.certificate <= 1e-10);
}

TEST_CASE("least squares matches the normal equations") {
  auto d = testing::lasso_data(3, 40, 12);
  const DenseMatrix a = d->features.to_dense();
  const ReferenceResult r = solve_l1_reference(QuadraticLoss(a, d->labels), 0.0);
  CHECK(r.converged);
  CHECK(testing::max_abs_diff(r.x, testing::normal_equations(a, d->labels)) <= 1e-8);
}

TEST_CASE("certificates for l1-logistic") {
  auto d = testing::logistic_data(5, 100, 20);
  const LogisticLoss f(d);
  const ReferenceResult r = solve_l1_reference(f, 0.01);
  CHECK(r.converged);
  CHECK(r.certificate <= 1e-10);
  CHECK(r.subgradient_residual <= 1e-8);
  std::size_t nnz = 0;
  for (double e : r.x) nnz += e != 0.0;
  CHECK(nnz > 0);
  CHECK(nnz < 20);
}

TEST_CASE("subgradient residual") {
  CHECK(l1_subgradient_residual(Vec{1.0, 0.0, -1.0}, Vec{-1.0, 0.5, 1.0}, 1.0) == 0.0);
  CHECK(l1_subgradient_residual(Vec{0.0}, Vec{3.0}, 1.0) == 2.0);
  CHECK(l1_subgradient_residual(Vec{2.0}, Vec{3.0}, 1.0) == 4.0);
}

TEST_CASE("iteration limit and argument checks") {
  auto d = testing::logistic_data(5, 100, 20);
  const LogisticLoss f(d);
  ReferenceOptions o;
  o.max_iter = 3;
  const ReferenceResult r = solve_l1_reference(f, 0.01, o);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
  CHECK_THROWS_AS(solve_l1_reference(f, -1.0), ParameterError);
  CHECK_THROWS_AS(solve_l1_reference(f, 0.1, {}, Vec{1.0}), ShapeError);
}
