#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "hetlink/rng.hpp"
#include "hetlink/tensor.hpp"

using namespace hetlink;

namespace {

std::vector<double> random_vec(Rng& rng, size_t n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("matmul identity and projector cases") {
  Tensor eye({2, 2}, {1, 0, 0, 1});
  Tensor a({2, 2}, {1, 2, 3, 4});
  Tensor r = matmul(eye, a);
  CHECK(r.at(0, 0) == 1);
  CHECK(r.at(0, 1) == 2);
  CHECK(r.at(1, 0) == 3);
  CHECK(r.at(1, 1) == 4);

  Tensor proj({2, 2}, {1, 0, 0, 0});
  Tensor b({2, 2}, {5, 6, 7, 8});
  Tensor p = matmul(proj, b);
  CHECK(p.at(0, 0) == 5);
  CHECK(p.at(0, 1) == 6);
  CHECK(p.at(1, 0) == 0);
  CHECK(p.at(1, 1) == 0);
}

TEST_CASE("matmul matches an independent triple-loop product") {
  Rng rng(3);
  Tensor a({3, 4}, random_vec(rng, 12));
  Tensor b({4, 2}, random_vec(rng, 8));
  Tensor c = matmul(a, b);
  for (size_t i = 0; i < 3; ++i) {
    for (size_t j = 0; j < 2; ++j) {
      double acc = 0.0;
      for (size_t k = 0; k < 4; ++k) acc += a.at(i, k) * b.at(k, j);
      CHECK(c.at(i, j) == doctest::Approx(acc).epsilon(1e-12));
    }
  }
}

TEST_CASE("matmul rejects mismatched inner dimensions") {
  Tensor a({2, 3});
  Tensor b({2, 2});
  CHECK_THROWS_AS(matmul(a, b), Error);
}

TEST_CASE("softmax_rows forced values") {
  Tensor x({1, 2}, {0, 0});
  Tensor y = softmax_rows(x);
  CHECK(y.at(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(y.at(0, 1) == doctest::Approx(0.5).epsilon(1e-14));

  Tensor x2({1, 2}, {std::log(2.0), 0.0});
  Tensor y2 = softmax_rows(x2);
  CHECK(y2.at(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(y2.at(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  // max shift keeps huge logits finite
  Tensor x3({1, 2}, {1000.0, 1000.0});
  Tensor y3 = softmax_rows(x3);
  CHECK(y3.at(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(y3.at(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("softmax_rows rows sum to 1 and shift invariance holds") {
  Rng rng(5);
  const size_t m = 12, n = 7;
  auto vals = random_vec(rng, m * n, -20.0, 20.0);
  Tensor x({m, n}, vals);
  Tensor y = softmax_rows(x);
  for (size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (size_t j = 0; j < n; ++j) s += y.at(i, j);
    CHECK(std::abs(s - 1.0) <= 1e-12);
  }
  // add a per-row constant
  auto shifted = vals;
  for (size_t i = 0; i < m; ++i) {
    const double c = rng.uniform(-50.0, 50.0);
    for (size_t j = 0; j < n; ++j) shifted[i * n + j] += c;
  }
  Tensor y2 = softmax_rows(Tensor({m, n}, shifted));
  for (size_t i = 0; i < m * n; ++i) {
    CHECK(std::abs(y.at(i) - y2.at(i)) <= 1e-12);
  }
}

TEST_CASE("cross_entropy forced and random values") {
  Tensor uniform({1, 2}, {0, 0});
  CHECK(cross_entropy(uniform, {0}).value() ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  Tensor peaked({1, 2}, {10, -10});
  CHECK(cross_entropy(peaked, {0}).value() == doctest::Approx(2.061e-9).epsilon(1e-3));

  Rng rng(9);
  const size_t m = 4, c = 3;
  Tensor logits({m, c}, random_vec(rng, m * c, -3.0, 3.0));
  std::vector<int> labels = {2, 0, 1, 1};
  const double got = cross_entropy(logits, labels).value();
  // independent scalar recomputation of -sum log p / m
  double expect = 0.0;
  for (size_t i = 0; i < m; ++i) {
    double z = 0.0;
    for (size_t j = 0; j < c; ++j) z += std::exp(logits.at(i, j));
    expect += -std::log(std::exp(logits.at(i, labels[i])) / z);
  }
  expect /= m;
  CHECK(got == doctest::Approx(expect).epsilon(1e-12));
  CHECK(got > 0.0);
}

TEST_CASE("cross_entropy rejects out-of-range labels") {
  Tensor logits({2, 3});
  CHECK_THROWS_AS(cross_entropy(logits, {0, 3}), Error);
  CHECK_THROWS_AS(cross_entropy(logits, {-1, 0}), Error);
}

TEST_CASE("backward of sum of squares gives 2x") {
  Tensor x({3}, {1, 2, 3}, true);
  Tape tape;
  Tape::Scope scope(tape);
  Tensor loss = sum(mul(x, x));
  tape.backward(loss);
  REQUIRE(x.has_grad());
  CHECK(x.grad()[0] == doctest::Approx(2.0));
  CHECK(x.grad()[1] == doctest::Approx(4.0));
  CHECK(x.grad()[2] == doctest::Approx(6.0));
}

TEST_CASE("backward with no requires_grad inputs records nothing") {
  Tensor a({2, 2}, {1, 2, 3, 4});
  Tensor b({2, 2}, {1, 1, 1, 1});
  Tape tape;
  Tape::Scope scope(tape);
  Tensor loss = sum(matmul(a, b));
  CHECK(tape.size() == 0);
  tape.backward(loss);  // no-op, no gradients anywhere
  CHECK_FALSE(a.has_grad());
  CHECK_FALSE(loss.requires_grad());
}

TEST_CASE("backward rejects non-scalar losses") {
  Tensor x({2, 2}, {1, 2, 3, 4}, true);
  Tape tape;
  Tape::Scope scope(tape);
  Tensor y = mul(x, x);
  CHECK_THROWS_AS(tape.backward(y), Error);
}

TEST_CASE("relu subgradient at zero is zero") {
  Tensor x({3}, {-1.0, 0.0, 2.0}, true);
  Tape tape;
  Tape::Scope scope(tape);
  tape.backward(sum(relu(x)));
  CHECK(x.grad()[0] == 0.0);
  CHECK(x.grad()[1] == 0.0);
  CHECK(x.grad()[2] == 1.0);
}

TEST_CASE("leaky_relu applies the slope on the negative side") {
  Tensor x({2}, {-2.0, 3.0});
  Tensor y = leaky_relu(x, 0.1);
  CHECK(y.at(0) == doctest::Approx(-0.2));
  CHECK(y.at(1) == doctest::Approx(3.0));
}

TEST_CASE("concat, gather, mean_rows and reshape move data correctly") {
  Tensor a({2, 2}, {1, 2, 3, 4});
  Tensor b({2, 1}, {5, 6});
  Tensor c = concat_cols(a, b);
  CHECK(c.cols() == 3);
  CHECK(c.at(0, 2) == 5);
  CHECK(c.at(1, 2) == 6);

  Tensor g = gather_rows(a, {1, 0, 1});
  CHECK(g.rows() == 3);
  CHECK(g.at(0, 0) == 3);
  CHECK(g.at(2, 1) == 4);
  CHECK_THROWS_AS(gather_rows(a, {2}), Error);

  Tensor m = mean_rows(a, {0, 1});
  CHECK(m.at(0) == doctest::Approx(2.0));
  CHECK(m.at(1) == doctest::Approx(3.0));

  Tensor r = reshape(a, {4});
  CHECK(r.rank() == 1);
  CHECK(r.at(3) == 4);
  CHECK_THROWS_AS(reshape(a, {5}), Error);
}

TEST_CASE("finite checks flag non-finite op results") {
  REQUIRE(finite_checks_enabled());
  Tensor big({1, 1}, std::vector<double>{1e308});
  CHECK_THROWS_AS(add(big, big), Error);
  CHECK_THROWS_AS(Tensor({1}, std::vector<double>{std::numeric_limits<double>::quiet_NaN()}),
                  Error);
  set_finite_checks(false);
  CHECK_NOTHROW(add(big, big));
  set_finite_checks(true);
}

TEST_CASE("forward values are bit-identical across repeats") {
  Rng rng(11);
  Tensor a({20, 30}, random_vec(rng, 600));
  Tensor b({30, 10}, random_vec(rng, 300));
  Tensor c1 = matmul(a, b);
  Tensor c2 = matmul(a, b);
  for (size_t i = 0; i < c1.numel(); ++i) CHECK(c1.at(i) == c2.at(i));
}

TEST_CASE("grad accumulates when a tensor feeds several ops") {
  Tensor x({2}, {1.0, 2.0}, true);
  Tape tape;
  Tape::Scope scope(tape);
  Tensor loss = sum(add(mul(x, x), scale(x, 3.0)));  // d/dx = 2x + 3
  tape.backward(loss);
  CHECK(x.grad()[0] == doctest::Approx(5.0));
  CHECK(x.grad()[1] == doctest::Approx(7.0));
}
