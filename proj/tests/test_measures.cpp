#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <mmot/measures.hpp>

#include "oracles.hpp"

using namespace mmot;

TEST_SUITE_BEGIN("measures");

TEST_CASE("uniform grid marginal uses cell midpoints and equal weights") {
  auto m = grid_marginal({0.0}, {1.0}, 4, "uniform");
  REQUIRE(m.size() == 4);
  CHECK(m.dim == 1);
  const double expected[4] = {0.125, 0.375, 0.625, 0.875};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(m.points[i][0] == doctest::Approx(expected[i]).epsilon(1e-15));
    CHECK(m.weights[i] == doctest::Approx(0.25).epsilon(1e-15));
  }
}

TEST_CASE("cos2 grid marginal weights follow the squared-cosine bump") {
  auto m = grid_marginal({0.0}, {1.0}, 4, "cos2");
  REQUIRE(m.size() == 4);
  // Independent recomputation of the unnormalized bump at the midpoints.
  const double pi = std::acos(-1.0);
  std::vector<double> raw(4);
  double total = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double t = (k + 0.5) / 4.0;
    raw[k] = std::pow(std::cos(pi * (t - 0.5)), 2);
    total += raw[k];
  }
  for (int k = 0; k < 4; ++k)
    CHECK(m.weights[k] == doctest::Approx(raw[k] / total).epsilon(1e-13));
  // Symmetric bump: outer weights equal, inner weights equal and larger.
  CHECK(m.weights[0] == doctest::Approx(m.weights[3]).epsilon(1e-14));
  CHECK(m.weights[1] == doctest::Approx(m.weights[2]).epsilon(1e-14));
  CHECK(m.weights[1] > m.weights[0]);
}

TEST_CASE("2d grid marginal is the product grid with product density") {
  auto m = grid_marginal({0.0, -1.0}, {1.0, 1.0}, 3, "cos2");
  REQUIRE(m.size() == 9);
  CHECK(m.dim == 2);
  double sum = 0.0;
  for (double w : m.weights) sum += w;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  // Center point of the 3x3 grid carries the largest weight.
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < 9; ++i)
    if (m.weights[i] > m.weights[argmax]) argmax = i;
  CHECK(m.points[argmax][0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.points[argmax][1] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("grid marginal weights sum to one exactly within 1e-12 at large n") {
  for (std::size_t n : {64, 257, 512}) {
    auto m = grid_marginal({0.0}, {1.0}, n, "cos2");
    long double s = 0.0L;
    for (double w : m.weights) s += w;
    CHECK(std::abs(static_cast<double>(s - 1.0L)) <= 1e-12);
  }
}

TEST_CASE("validate rejects malformed marginals") {
  CHECK_THROWS_AS(make_marginal({{0.0}, {1.0}}, {0.7, 0.7}, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_marginal({{0.0}, {1.0}}, {-0.1, 1.1}, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_marginal({{0.0}, {1.0, 2.0}}, {0.5, 0.5}, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_marginal({{0.5}, {0.5}}, {0.5, 0.5}, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_marginal({{0.0}, {1.0}}, {0.5}, 1), std::invalid_argument);
  CHECK_NOTHROW(make_marginal({{0.0}, {1.0}}, {0.5, 0.5}, 1));
}

TEST_CASE("product coupling projects back to its marginals") {
  std::mt19937_64 rng(7);
  auto a = oracle::random_marginal_1d(rng, 4);
  auto b = oracle::random_marginal_1d(rng, 5);
  auto c = oracle::random_marginal_1d(rng, 3);
  auto space = make_space({a, b, c});
  auto g = product_coupling(space);
  CHECK(g.density.sum() == doctest::Approx(1.0).epsilon(1e-13));
  for (std::size_t axis = 0; axis < 3; ++axis) {
    auto proj = marginal_projection(g, axis);
    const auto& w = space.marginals[axis].weights;
    REQUIRE(proj.size() == w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
      CHECK(proj[i] == doctest::Approx(w[i]).epsilon(1e-13));
  }
}

TEST_CASE("marginal projection agrees with brute-force enumeration") {
  std::mt19937_64 rng(11);
  auto a = oracle::random_marginal_1d(rng, 3);
  auto b = oracle::random_marginal_1d(rng, 4);
  auto space = make_space({a, b});
  Coupling g{space, oracle::random_cost_tensor(rng, {3, 4}, 0.0, 1.0)};
  const double total = g.density.sum();
  for (std::size_t i = 0; i < g.density.size(); ++i) g.density[i] /= total;
  for (std::size_t axis = 0; axis < 2; ++axis) {
    auto fast = marginal_projection(g, axis);
    auto slow = oracle::project_bruteforce(g, axis);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i)
      CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-14));
  }
}

TEST_CASE("relative entropy of the product coupling is zero") {
  std::mt19937_64 rng(13);
  auto a = oracle::random_marginal_1d(rng, 6);
  auto b = oracle::random_marginal_1d(rng, 5);
  auto space = make_space({a, b});
  auto g = product_coupling(space);
  CHECK(std::abs(relative_entropy(g)) <= 1e-13);
}

TEST_CASE("relative entropy of a permutation coupling on uniform atoms is (m-1) log n") {
  const std::size_t n = 5;
  auto m1 = grid_marginal({0.0}, {1.0}, n, "uniform");
  auto m2 = grid_marginal({2.0}, {3.0}, n, "uniform");
  auto m3 = grid_marginal({4.0}, {5.0}, n, "uniform");
  auto space = make_space({m1, m2, m3});
  Coupling g{space, Tensor({n, n, n})};
  for (std::size_t i = 0; i < n; ++i) g.density.at({i, i, i}) = 1.0 / n;
  CHECK(relative_entropy(g) == doctest::Approx(2.0 * std::log(double(n))).epsilon(1e-12));
}

TEST_CASE("relative entropy returns +infinity off the product support") {
  auto m1 = make_marginal({{0.0}, {1.0}}, {1.0, 0.0}, 1);
  auto m2 = make_marginal({{0.0}, {1.0}}, {0.5, 0.5}, 1);
  auto space = make_space({m1, m2});
  Coupling g{space, Tensor({2, 2})};
  g.density.at({1, 0}) = 1.0;  // charges a zero-weight atom of marginal 1
  CHECK(relative_entropy(g) == std::numeric_limits<double>::infinity());
}

TEST_CASE("cost integral agrees with brute-force enumeration") {
  std::mt19937_64 rng(17);
  auto a = oracle::random_marginal_1d(rng, 3);
  auto b = oracle::random_marginal_1d(rng, 3);
  auto c = oracle::random_marginal_1d(rng, 2);
  auto space = make_space({a, b, c});
  auto g = product_coupling(space);
  auto cost = oracle::random_cost_tensor(rng, {3, 3, 2}, -1.0, 1.0);
  double slow = 0.0;
  std::vector<std::size_t> idx(3, 0);
  for (std::size_t flat = 0; flat < cost.size(); ++flat) {
    slow += g.density[flat] * cost[flat];
    next_index(idx, cost.shape());
  }
  CHECK(cost_integral(g, cost) == doctest::Approx(slow).epsilon(1e-14));
}

TEST_CASE("tuple_points returns one coordinate vector per marginal") {
  auto m1 = grid_marginal({0.0}, {1.0}, 2, "uniform");
  auto m2 = grid_marginal({0.0, 0.0}, {1.0, 1.0}, 2, "uniform");
  auto space = make_space({m1, m2});
  auto pts = tuple_points(space, {1, 2});
  REQUIRE(pts.size() == 2);
  CHECK(pts[0] == std::vector<double>{0.75});
  CHECK(pts[1] == m2.points[2]);
}

TEST_CASE("make_space requires at least two marginals") {
  auto m = grid_marginal({0.0}, {1.0}, 2, "uniform");
  CHECK_THROWS_AS(make_space({m}), std::invalid_argument);
}

TEST_SUITE_END();
