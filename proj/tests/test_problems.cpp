#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "pdfp/errors.hpp"
#include "pdfp/libsvm.hpp"
#include "pdfp/problems.hpp"
#include "pdfp/trace.hpp"

using namespace pdfp;

TEST_CASE("logistic loss basics") {
  auto data = testing::logistic_data(1, 30, 5);
  std::vector<std::size_t> all(30);
  for (std::size_t i = 0; i < 30; ++i) all[i] = i;
  CHECK(logistic_value_grad(Vec(5, 0.0), *data, all).value == doctest::Approx(std::log(2.0)));
  const std::vector<std::size_t> bad{30};
  CHECK_THROWS_AS(logistic_value_grad(Vec(5, 0.0), *data, bad), ParameterError);
}

TEST_CASE("logistic loss saturates without overflow") {
  DenseMatrix a(1, 1);
  a(0, 0) = 1.0;
  auto d = std::make_shared<Dataset>(Dataset{FeatureMatrix(a), Vec{1.0}});
  const std::vector<std::size_t> one{0};
  for (double t : {50.0, 1e4, 1e300}) {
    const ValueGrad hi = logistic_value_grad(Vec{t}, *d, one);
    CHECK(std::isfinite(hi.value));
    CHECK(hi.value <= 1e-20);
    CHECK(std::abs(hi.grad[0]) <= 1e-20);
    const ValueGrad lo = logistic_value_grad(Vec{-t}, *d, one);
    CHECK(std::isfinite(lo.value));
    CHECK(lo.value == doctest::Approx(t).epsilon(1e-12));
    CHECK(lo.grad[0] == doctest::Approx(-1.0));
  }
}

TEST_CASE("gradients match central finite differences") {
  std::mt19937_64 rng(13);
  auto ldata = testing::logistic_data(2, 40, 6);
  const LogisticLoss logistic(ldata);
  auto qdata = testing::lasso_data(2, 40, 6);
  const QuadraticLoss quadratic(qdata->features.to_dense(), qdata->labels);
  for (int t = 0; t < 20; ++t) {
    const Vec x = testing::random_vec(rng, 6);
    CHECK(testing::gradient_fd_error(logistic, x) <= 1e-6);
    CHECK(testing::gradient_fd_error(quadratic, x) <= 1e-6);
    const ValueGrad q = quadratic_value_grad(x, qdata->features.to_dense(), qdata->labels);
    CHECK(q.value == doctest::Approx(quadratic.value(x)));
  }
}

TEST_CASE("quadratic loss closed forms") {
  const DenseMatrix id = DenseMatrix::identity(3);
  const ValueGrad r = quadratic_value_grad(Vec{1.0, 2.0, 2.0}, id, Vec{0.0, 0.0, 0.0});
  CHECK(r.value == 4.5);
  CHECK(r.grad == Vec{1.0, 2.0, 2.0});
  const ValueGrad z = quadratic_value_grad(Vec{1.0, 2.0, 2.0}, id, Vec{1.0, 2.0, 2.0});
  CHECK(z.value == 0.0);
  CHECK_THROWS_AS(quadratic_value_grad(Vec{1.0}, id, Vec{0.0, 0.0, 0.0}), ShapeError);
}

TEST_CASE("Lipschitz estimates") {
  const FeatureMatrix id(DenseMatrix::identity(4));
  CHECK(lipschitz_estimate(id, LossKind::Quadratic, 4) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(lipschitz_estimate(id, LossKind::Logistic, 4) == doctest::Approx(1.0 / 16).epsilon(1e-10));
  std::mt19937_64 rng(50);
  const DenseMatrix a = testing::random_matrix(rng, 50, 20);
  const double expect = testing::eigen_gram_max(testing::to_eigen(a));
  CHECK(std::abs(lipschitz_estimate(FeatureMatrix(a), LossKind::Quadratic, 50) - expect) / expect <=
        1e-6);
}

TEST_CASE("partitions") {
  const Partition c = partition_dataset(10, 2, PartitionStrategy::Contiguous);
  CHECK(c.blocks[0] == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK(c.blocks[1] == std::vector<std::size_t>{5, 6, 7, 8, 9});
  const Partition s = partition_dataset(7, 3, PartitionStrategy::Strided);
  CHECK(s.blocks[0] == std::vector<std::size_t>{0, 3, 6});
  const Partition r1 = partition_dataset(23, 4, PartitionStrategy::SeededRandom, 5);
  const Partition r2 = partition_dataset(23, 4, PartitionStrategy::SeededRandom, 5);
  CHECK(r1.blocks == r2.blocks);
  for (const Partition& p : {c, s, r1}) {
    const std::size_t m = p.blocks == c.blocks ? 10 : (p.blocks == s.blocks ? 7 : 23);
    CHECK_NOTHROW(p.validate(m));
    std::size_t lo = m, hi = 0;
    for (const auto& b : p.blocks) {
      lo = std::min(lo, b.size());
      hi = std::max(hi, b.size());
    }
    CHECK(hi - lo <= 1);
  }
  CHECK_THROWS_AS(partition_dataset(3, 4, PartitionStrategy::Contiguous), ParameterError);
  CHECK_THROWS_AS((Partition{{{0, 1}, {1, 2}}}.validate(3)), PartitionError);
  CHECK_THROWS_AS((Partition{{{0, 1}, {}}}.validate(2)), PartitionError);
  CHECK_THROWS_AS((Partition{{{0}}}.validate(2)), PartitionError);
}

TEST_CASE("batched problems add up to the full problem") {
  auto data = testing::logistic_data(4, 50, 7);
  const double tau = 0.3;
  const LogisticLoss full(data);
  std::mt19937_64 rng(6);
  for (std::size_t n : {1u, 3u, 5u}) {
    const BatchedProblem b =
        build_batched_logistic(data, partition_dataset(50, n, PartitionStrategy::SeededRandom, 1), tau);
    CHECK(b.batches() == n);
    for (int t = 0; t < 100; ++t) {
      const Vec x = testing::random_vec(rng, 7);
      double fsum = 0.0, gsum = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        fsum += b.f[k]->value(x);
        gsum += b.g[k].value(x);
      }
      double l1 = 0.0;
      for (double e : x) l1 += std::abs(e);
      CHECK(std::abs(fsum - full.value(x)) <= 1e-12);
      CHECK(gsum == doctest::Approx(tau * l1).epsilon(1e-13));
    }
    for (const auto& f : b.f) CHECK(f->lipschitz() == b.lipschitz());
  }
  auto qd = testing::lasso_data(4, 20, 5);
  const BatchedProblem bl = build_batched_lasso(qd, partition_dataset(20, 4, PartitionStrategy::Contiguous), 1.0);
  const QuadraticLoss qfull(qd->features.to_dense(), qd->labels);
  const Vec x = testing::random_vec(rng, 5);
  double s = 0.0;
  for (const auto& f : bl.f) s += f->value(x);
  CHECK(s == doctest::Approx(qfull.value(x)).epsilon(1e-12));
}

TEST_CASE("dataset validation") {
  Dataset d{FeatureMatrix(DenseMatrix::identity(2)), Vec{1.0, 0.5}};
  CHECK_NOTHROW(d.validate(LossKind::Quadratic));
  CHECK_THROWS_AS(d.validate(LossKind::Logistic), ParameterError);
  d.labels = {1.0};
  CHECK_THROWS_AS(d.validate(LossKind::Quadratic), ShapeError);
  d.labels = {1.0, std::nan("")};
  CHECK_THROWS_AS(d.validate(LossKind::Quadratic), ParameterError);
}

TEST_CASE("synthetic data") {
  SyntheticSpec s;
  s.kind = LossKind::Quadratic;
  s.seed = 3;
  s.m = 30;
  s.q = 10;
  s.sparsity = 0.3;
  const SyntheticData a = generate_synthetic(s), b = generate_synthetic(s);
  CHECK(a.data.features.dense().data == b.data.features.dense().data);
  CHECK(a.data.labels == b.data.labels);
  std::size_t nnz = 0;
  for (double e : a.ground_truth) {
    CHECK((e == 0.0 || std::abs(e) == 1.0));
    nnz += e != 0.0;
  }
  CHECK(nnz == 3);
  s.sparsity = 0.0;
  s.noise = 0.0;
  const SyntheticData z = generate_synthetic(s);
  CHECK(norm_inf(z.ground_truth) == 0.0);
  CHECK(norm_inf(z.data.labels) == 0.0);
  s.kind = LossKind::Logistic;
  s.sparsity = 0.5;
  for (double y : generate_synthetic(s).data.labels) CHECK(std::abs(y) == 1.0);
  s.sparsity = 1.5;
  CHECK_THROWS_AS(generate_synthetic(s), ParameterError);
}

TEST_CASE("LIBSVM parsing") {
  std::istringstream one("+1 1:0.5 3:2.0\n");
  const LibsvmData d = parse_libsvm(one);
  CHECK(d.data.m() == 1);
  CHECK(d.data.q() == 3);
  CHECK(d.data.labels[0] == 1.0);
  CHECK(d.data.features.to_dense().data == Vec{0.5, 0.0, 2.0});

  std::istringstream two("-1 2:1\n\n# comment\n+1 5:1\n");
  CHECK(parse_libsvm(two).data.q() == 5);

  std::istringstream bad("abc 1:1\n");
  try {
    parse_libsvm(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 1);
  }
  std::istringstream bad2("1 1:1\n1 2:1 3\n");
  try {
    parse_libsvm(bad2);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 7);
  }
  std::istringstream order("1 3:1 2:1\n");
  CHECK_THROWS_AS(parse_libsvm(order), ParseError);
  std::istringstream zero_idx("1 0:1\n");
  CHECK_THROWS_AS(parse_libsvm(zero_idx), ParseError);
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_libsvm(empty), ParseError);
}

TEST_CASE("LIBSVM label mapping") {
  std::istringstream in("0 1:1\n1 1:2\n");
  LibsvmOptions o;
  o.map_binary_labels = true;
  const LibsvmData d = parse_libsvm(in, o);
  CHECK(d.labels_remapped);
  CHECK(d.data.labels == Vec{-1.0, 1.0});
  std::istringstream in2("0 1:1\n1 1:2\n");
  CHECK_FALSE(parse_libsvm(in2).labels_remapped);
}

TEST_CASE("LIBSVM round trip") {
  auto data = testing::logistic_data(8, 12, 6);
  std::stringstream ss;
  write_libsvm(ss, *data);
  LibsvmOptions o;
  o.min_features = 6;
  const LibsvmData back = parse_libsvm(ss, o);
  CHECK(back.data.labels == data->labels);
  CHECK(back.data.features.to_dense().data == data->features.to_dense().data);
}

TEST_CASE("trace CSV round trip") {
  IterationTrace t;
  t.push_back({1, 0.001, 1.0 / 3.0, 0.1, std::nan(""), {}});
  t.push_back({2, 0.002, 0.25, 1e-300, 0.5, {3}});
  t.push_back({5, 0.003, -2.0, 0.0, 1.5, {0, 2, 4}});
  std::stringstream ss;
  write_trace_csv(ss, t);
  const std::string text = ss.str();
  CHECK(text.rfind(std::string(kTraceHeader) + "\n", 0) == 0);
  CHECK(text.find("\"0,2,4\"") != std::string::npos);
  const IterationTrace back = read_trace_csv(ss);
  REQUIRE(back.size() == 3);
  CHECK(back[0].objective == t[0].objective);
  CHECK(std::isnan(back[0].consensus_residual));
  CHECK(back[1].fp_residual == 1e-300);
  CHECK(back[2].active_set == std::vector<std::size_t>{0, 2, 4});

  std::istringstream wrong_header("iter,time,objective\n");
  CHECK_THROWS_AS(read_trace_csv(wrong_header), ParseError);
  std::istringstream non_increasing(std::string(kTraceHeader) + "\n2,0,1,1,,\n2,0,1,1,,\n");
  CHECK_THROWS_AS(read_trace_csv(non_increasing), ParseError);
}
