#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "pdfp/errors.hpp"
#include "pdfp/km.hpp"

using namespace pdfp;

namespace {

// Averaged affine map x -> x/2 + c/2, fixed point c.
BlockOperator halfway(const Vec& c, std::size_t blocks) {
  return BlockOperator::contiguous(
      c.size(),
      [c](std::span<const double> x) {
        Vec out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = 0.5 * x[i] + 0.5 * c[i];
        return out;
      },
      blocks);
}

}  // namespace

TEST_CASE("block operator validates the partition") {
  auto id = [](std::span<const double> x) { return Vec(x.begin(), x.end()); };
  CHECK_NOTHROW(BlockOperator(3, id, {{0, 2}, {1}}));
  CHECK_THROWS_AS(BlockOperator(3, id, {{0, 1}, {1, 2}}), ParameterError);
  CHECK_THROWS_AS(BlockOperator(3, id, {{0}, {1}}), ParameterError);
  CHECK_THROWS_AS(BlockOperator(3, id, {{0, 1, 3}, {2}}), ParameterError);
  CHECK_THROWS_AS(BlockOperator(3, id, {{0}, {}, {1, 2}}), ParameterError);
  CHECK(BlockOperator::contiguous(10, id, 3).block(0).size() == 4);
}

TEST_CASE("masked apply keeps unselected blocks") {
  const Vec c{10, 20, 30, 40};
  const BlockOperator t = halfway(c, 2);
  const Vec x{0, 0, 0, 0};
  CHECK(masked_apply(t, x, std::vector<std::size_t>{1}) == Vec{0, 0, 15, 20});
  CHECK(masked_apply(t, x, std::vector<std::size_t>{}) == x);
  CHECK(masked_apply(t, x, std::vector<std::size_t>{0, 1}) == t.apply(x));
  CHECK(t.apply_block(x, 0) == Vec{5, 10});
  CHECK_THROWS_AS(masked_apply(t, x, std::vector<std::size_t>{2}), ParameterError);
}

TEST_CASE("km step and residual") {
  const BlockOperator t = halfway(Vec{4, 4}, 1);
  CHECK(km_step(t, Vec{0, 0}, 0.5) == Vec{1, 1});
  CHECK(km_step(t, Vec{0, 0}, 1.0) == Vec{2, 2});
  CHECK(fixed_point_residual(t, Vec{0, 0}) == doctest::Approx(std::sqrt(8.0)));
  CHECK_THROWS_AS(km_step(t, Vec{0, 0}, 0.0), ParameterError);
  CHECK_THROWS_AS(km_step(t, Vec{0, 0}, 1.5), ParameterError);
}

TEST_CASE("weighted norm") {
  auto id = [](std::span<const double> x) { return Vec(x.begin(), x.end()); };
  const BlockOperator t(2, id, {{0}, {1}}, Vec{0.25, 1.0});
  CHECK(t.norm(Vec{2.0, 1.0}) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(BlockOperator(2, id, {{0}, {1}}, Vec{1.0}), ShapeError);
}

TEST_CASE("samplers") {
  SUBCASE("single uniform picks one block with equal frequency") {
    auto s = CoordinateSampler::single_uniform(4, 7);
    std::vector<int> hits(4, 0);
    for (int i = 0; i < 40000; ++i) {
      const auto k = s.sample();
      REQUIRE(k.size() == 1);
      ++hits[k[0]];
    }
    for (int h : hits) CHECK(std::abs(h - 10000) < 500);
    CHECK(s.inclusion_probability(2) == 0.25);
  }
  SUBCASE("independent inclusion") {
    auto s = CoordinateSampler::independent(5, 0.3, 1);
    std::size_t total = 0;
    for (int i = 0; i < 20000; ++i) total += s.sample().size();
    CHECK(std::abs(static_cast<double>(total) / 20000 - 1.5) < 0.05);
    CHECK_THROWS_AS(CoordinateSampler::independent(5, 0.0, 1), ConfigError);
  }
  SUBCASE("full and weighted") {
    auto f = CoordinateSampler::full(3);
    CHECK(f.sample() == std::vector<std::size_t>{0, 1, 2});
    auto w = CoordinateSampler::single_weighted({1.0, 3.0}, 2);
    int ones = 0;
    for (int i = 0; i < 20000; ++i) ones += w.sample()[0] == 1;
    CHECK(std::abs(ones - 15000) < 400);
    CHECK_THROWS_AS(CoordinateSampler::single_weighted({1.0, 0.0}, 2), ConfigError);
  }
  SUBCASE("same seed, same draws") {
    auto a = CoordinateSampler::single_uniform(9, 42), b = CoordinateSampler::single_uniform(9, 42);
    for (int i = 0; i < 100; ++i) CHECK(a.sample() == b.sample());
  }
}

TEST_CASE("relaxation schedules") {
  CHECK(RelaxationSchedule::paper_literal().at(10) == 1.0);
  CHECK(RelaxationSchedule::constant(0.5).at(3) == 0.5);
  CHECK_THROWS_AS(RelaxationSchedule::constant(1.0), ParameterError);
  CHECK_THROWS_AS(RelaxationSchedule::constant(0.0), ParameterError);
  const auto bad = RelaxationSchedule::custom([](std::size_t) { return 2.0; });
  CHECK_THROWS_AS(bad.at(0), ParameterError);
}

TEST_CASE("randomized KM converges to the fixed point") {
  std::mt19937_64 rng(4);
  const Vec c = testing::random_vec(rng, 12);
  const BlockOperator t = halfway(c, 4);
  for (const auto& schedule : {RelaxationSchedule::paper_literal(), RelaxationSchedule::constant(0.5)}) {
    auto sampler = CoordinateSampler::single_uniform(4, 11);
    const KmResult r = randomized_km_run(t, Vec(12, 0.0), sampler, schedule, StoppingRule{100000, 1e-12});
    CHECK(r.converged);
    CHECK(testing::max_abs_diff(r.x, c) < 1e-11);
    CHECK(r.residuals.size() == r.iterations + 1);
    CHECK(r.trace.size() == r.iterations);
  }
}

TEST_CASE("randomized KM rejects mismatched samplers") {
  const BlockOperator t = halfway(Vec{1, 2, 3}, 3);
  auto sampler = CoordinateSampler::single_uniform(2, 1);
  CHECK_THROWS_AS(randomized_km_run(t, Vec{0, 0, 0}, sampler, RelaxationSchedule::paper_literal(),
                                    StoppingRule{}),
                  ConfigError);
}
