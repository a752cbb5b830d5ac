#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "helpers.hpp"
#include "pdfp/errors.hpp"
#include "pdfp/kernels.hpp"
#include "pdfp/prox.hpp"

using namespace pdfp;

namespace {

std::vector<std::pair<std::string, ProxFn>> catalog(std::size_t& dim) {
  dim = 12;
  return {
      {"zero", ProxFn::zero()},
      {"l1", ProxFn::l1(0.7)},
      {"consensus", ProxFn::consensus(4, 3)},
      {"pair_consensus", ProxFn::pair_consensus(3)},
      {"block_separable",
       ProxFn::block_separable({ProxFn::l1(0.2), ProxFn::zero(), ProxFn::l1(1.5), ProxFn::l1(0.0)},
                               3)},
  };
}

}  // namespace

TEST_CASE("soft threshold") {
  CHECK(soft_threshold(Vec{3.0, -0.5, -2.0}, 1.0) == Vec{2.0, 0.0, -1.0});
  CHECK(soft_threshold(Vec{1.0, -1.0}, 1.0) == Vec{0.0, 0.0});
  CHECK(soft_threshold(Vec{0.25}, 0.0) == Vec{0.25});
  CHECK_THROWS_AS(soft_threshold(Vec{1.0}, -0.1), ParameterError);
}

TEST_CASE("consensus projections") {
  const auto [a, b] = project_pair_consensus(Vec{1.0, 4.0}, Vec{3.0, 0.0});
  CHECK(a == Vec{2.0, 2.0});
  CHECK(b == a);
  const auto p = project_consensus({Vec{0.0, 3.0}, Vec{3.0, 0.0}, Vec{6.0, 6.0}});
  for (const Vec& blk : p) CHECK(blk == Vec{3.0, 3.0});
  CHECK_THROWS_AS(project_consensus({}), Error);
  CHECK_THROWS_AS(project_pair_consensus(Vec{1.0}, Vec{1.0, 2.0}), ShapeError);
}

TEST_CASE("lambda norm") {
  CHECK(lambda_norm(Vec{2.0}, Vec{3.0}, 0.25) == doctest::Approx(std::sqrt(10.0)));
  CHECK(lambda_norm(ProductPoint{Vec{0.0}, Vec{0.0}}, 1.0) == 0.0);
  CHECK_THROWS_AS(lambda_norm(Vec{1.0}, Vec{1.0}, 0.0), ParameterError);
}

TEST_CASE("prox values and closed forms") {
  const ProxFn l1 = ProxFn::l1(2.0);
  CHECK(l1.value(Vec{1.0, -3.0}) == 8.0);
  CHECK(l1.prox(Vec{5.0, -1.0}, 0.5) == Vec{4.0, 0.0});
  CHECK(ProxFn::zero().residual(Vec{1.0, 2.0}, 3.0) == Vec{0.0, 0.0});
  const ProxFn pc = ProxFn::pair_consensus(1);
  CHECK(pc.value(Vec{1.0, 1.0}) == 0.0);
  CHECK(std::isinf(pc.value(Vec{1.0, 2.0})));
  const Vec r = pc.residual(Vec{5.0, 1.0, -1.0, 2.0}, 1.0);
  CHECK(r == Vec{2.0, -2.0, -1.5, 1.5});
  const ProxFn cons = ProxFn::consensus(3, 1);
  CHECK(cons.prox(Vec{1.0, 2.0, 6.0}, 10.0) == Vec{3.0, 3.0, 3.0});
  CHECK(cons.is_indicator());
  CHECK_FALSE(l1.is_indicator());
  CHECK(ProxFn::zero().is_zero());
  CHECK_THROWS_AS(l1.prox(Vec{1.0}, 0.0), ParameterError);
  CHECK_THROWS_AS(ProxFn::l1(-1.0), ParameterError);
  CHECK_THROWS_AS(cons.prox(Vec{1.0, 2.0}, 1.0), ShapeError);
}

TEST_CASE("block separable applies each part to its block") {
  const ProxFn g = ProxFn::block_separable({ProxFn::l1(1.0), ProxFn::zero()}, 2);
  CHECK(g.prox(Vec{3.0, -0.5, 3.0, -0.5}, 1.0) == Vec{2.0, 0.0, 3.0, -0.5});
  CHECK(g.value(Vec{1.0, -1.0, 5.0, 5.0}) == 2.0);
  CHECK_THROWS_AS(g.prox(Vec{1.0, 2.0, 3.0}, 1.0), ShapeError);
}

TEST_CASE("prox and residual decompose the identity") {
  std::size_t dim = 0;
  std::mt19937_64 rng(3);
  for (const auto& [name, fn] : catalog(dim)) {
    CAPTURE(name);
    for (int t = 0; t < 50; ++t) {
      const Vec x = testing::random_vec(rng, dim, 2.0);
      const double scale = 0.1 + 0.2 * t;
      const Vec p = fn.prox(x, scale);
      const Vec r = fn.residual(x, scale);
      for (std::size_t i = 0; i < dim; ++i) CHECK(p[i] + r[i] == doctest::Approx(x[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("prox is firmly nonexpansive and so is its residual") {
  std::size_t dim = 0;
  std::mt19937_64 rng(17);
  for (const auto& [name, fn] : catalog(dim)) {
    CAPTURE(name);
    for (int t = 0; t < 200; ++t) {
      const Vec x = testing::random_vec(rng, dim, 3.0), y = testing::random_vec(rng, dim, 3.0);
      const double scale = 0.05 + 0.01 * t;
      const Vec dp = sub(fn.prox(x, scale), fn.prox(y, scale));
      const Vec dr = sub(fn.residual(x, scale), fn.residual(y, scale));
      const Vec d = sub(x, y);
      CHECK(kernels::squared_norm(dp) <= kernels::dot(dp, d) + 1e-10);
      CHECK(kernels::squared_norm(dr) <= kernels::dot(dr, d) + 1e-10);
    }
  }
}

TEST_CASE("prox minimizes the proximal objective") {
  std::mt19937_64 rng(8);
  const ProxFn fn = ProxFn::l1(0.6);
  for (int t = 0; t < 20; ++t) {
    const Vec x = testing::random_vec(rng, 5, 2.0);
    const Vec p = fn.prox(x, 1.3);
    auto obj = [&](const Vec& y) {
      double s = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) s += 0.5 * (x[i] - y[i]) * (x[i] - y[i]);
      return 1.3 * fn.value(y) + s;
    };
    const double best = obj(p);
    for (int k = 0; k < 20; ++k) {
      Vec y = p;
      const Vec d = testing::random_vec(rng, 5, 0.01);
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += d[i];
      CHECK(obj(y) >= best - 1e-14);
    }
  }
}

TEST_CASE("Moreau identity: l1 residual is the box projection") {
  std::mt19937_64 rng(12);
  const double w = 0.7;
  const ProxFn f = ProxFn::l1(w);
  for (double c : {0.1, 1.0, 3.5}) {
    const Vec x = testing::random_vec(rng, 40, 4.0);
    const Vec r = f.residual(x, c);
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(r[i] == doctest::Approx(std::clamp(x[i], -c * w, c * w)).epsilon(1e-15));
  }
}
