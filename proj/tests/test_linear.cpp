#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "pdfp/distributed.hpp"
#include "pdfp/errors.hpp"
#include "pdfp/kernels.hpp"
#include "pdfp/linear_map.hpp"
#include "pdfp/opnorm.hpp"

using namespace pdfp;

namespace {

void check_adjoint(const LinearMap& d, std::mt19937_64& rng) {
  for (int t = 0; t < 10; ++t) {
    const Vec x = testing::random_vec(rng, d.in_dim());
    const Vec y = testing::random_vec(rng, d.out_dim());
    const double lhs = kernels::dot(d.apply(x), y);
    const double rhs = kernels::dot(x, d.adjoint(y));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

class ZeroMap final : public LinearMap {
 public:
  std::size_t in_dim() const override { return 3; }
  std::size_t out_dim() const override { return 2; }
  void apply(std::span<const double>, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
  }
  void apply_adjoint(std::span<const double>, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
  }
  std::string describe() const override { return "zero"; }
};

}  // namespace

TEST_CASE("adjoints satisfy <Dx, y> = <x, D^T y>") {
  std::mt19937_64 rng(2);
  check_adjoint(IdentityMap(7), rng);
  const auto m = std::make_shared<MatrixMap>(testing::random_matrix(rng, 6, 4));
  check_adjoint(*m, rng);
  check_adjoint(StackedWithIdentity(m), rng);
  CsrMatrix csr;
  csr.push_row(std::vector<std::size_t>{0, 3}, Vec{1.0, -2.0});
  csr.push_row(std::vector<std::size_t>{}, Vec{});
  csr.push_row(std::vector<std::size_t>{1}, Vec{4.0});
  check_adjoint(MatrixMap(std::make_shared<const FeatureMatrix>(csr)), rng);
  const auto g = std::make_shared<NetworkGraph>(NetworkGraph::star(5));
  check_adjoint(EdgeOperator(g, 3), rng);
}

TEST_CASE("dimension mismatches are rejected") {
  IdentityMap id(3);
  Vec out(2);
  CHECK_THROWS_AS(id.apply(Vec{1.0, 2.0, 3.0}, out), ShapeError);
}

TEST_CASE("power iteration matches a dense eigendecomposition") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 10; ++t) {
    const DenseMatrix a = testing::random_matrix(rng, 15 + t, 8 + t);
    const double expect = testing::eigen_gram_max(testing::to_eigen(a));
    const double got = power_iteration_opnorm(MatrixMap(a));
    CHECK(std::abs(got - expect) / expect <= 1e-6);
    // Safety-inflated variant never underestimates by more than rounding.
    CHECK(gram_max_eigenvalue(MatrixMap(a)) >= expect * (1 - 1e-9));
  }
}

TEST_CASE("known Gram eigenvalues") {
  CHECK(gram_max_eigenvalue(IdentityMap(4)) == 1.0);
  const auto g = std::make_shared<NetworkGraph>(NetworkGraph::star(6));
  const auto e = std::make_shared<EdgeOperator>(g, 2);
  CHECK(gram_max_eigenvalue(*e) == 5.0);
  CHECK(StackedWithIdentity(e).known_gram_max_eigenvalue().value() == 6.0);
  CHECK(power_iteration_opnorm(*e) == doctest::Approx(5.0).epsilon(1e-8));
}

TEST_CASE("power iteration failures") {
  CHECK_THROWS_AS(power_iteration_opnorm(ZeroMap()), ParameterError);
  std::mt19937_64 rng(1);
  const DenseMatrix a = testing::random_matrix(rng, 30, 30);
  PowerIterationOptions o;
  o.max_iter = 2;
  o.tol = 1e-15;
  try {
    power_iteration_opnorm(MatrixMap(a), o);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_estimate() > 0.0);
  }
}
