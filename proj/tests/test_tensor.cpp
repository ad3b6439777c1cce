#include <doctest.h>

#include <numeric>
#include <stdexcept>
#include <vector>

#include <mmot/tensor.hpp>

using mmot::Tensor;

TEST_SUITE_BEGIN("tensor");

TEST_CASE("construction zero-fills and reports shape") {
  Tensor t({2, 3, 4});
  CHECK(t.size() == 24);
  CHECK(t.shape() == std::vector<std::size_t>{2, 3, 4});
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i] == 0.0);
}

TEST_CASE("flat and multi-index access agree") {
  Tensor t({2, 3, 4});
  std::iota(t.data().begin(), t.data().end(), 0.0);
  // Row-major: index (i,j,k) -> i*12 + j*4 + k.
  CHECK(t.at({0, 0, 0}) == 0.0);
  CHECK(t.at({1, 2, 3}) == 23.0);
  CHECK(t.at({1, 0, 2}) == 14.0);
  CHECK(t.flat_index({1, 1, 1}) == 17);
}

TEST_CASE("strides are row-major") {
  Tensor t({5, 7, 2});
  CHECK(t.stride(0) == 14);
  CHECK(t.stride(1) == 2);
  CHECK(t.stride(2) == 1);
}

TEST_CASE("sum accumulates every entry") {
  Tensor t({3, 3});
  std::iota(t.data().begin(), t.data().end(), 1.0);
  CHECK(t.sum() == doctest::Approx(45.0).epsilon(1e-15));
}

TEST_CASE("next_index walks tuples in row-major order and wraps") {
  const std::vector<std::size_t> shape{2, 2};
  std::vector<std::size_t> idx{0, 0};
  std::vector<std::vector<std::size_t>> seen;
  do {
    seen.push_back(idx);
  } while (mmot::next_index(idx, shape));
  REQUIRE(seen.size() == 4);
  CHECK(seen[0] == std::vector<std::size_t>{0, 0});
  CHECK(seen[1] == std::vector<std::size_t>{0, 1});
  CHECK(seen[2] == std::vector<std::size_t>{1, 0});
  CHECK(seen[3] == std::vector<std::size_t>{1, 1});
  CHECK(idx == std::vector<std::size_t>{0, 0});
}

TEST_CASE("entry guard rejects oversized tensors") {
  // 400^3 = 6.4e7 entries exceeds the 5e7 guard.
  CHECK_THROWS_AS(Tensor({400, 400, 400}), std::length_error);
  CHECK_THROWS_AS(mmot::checked_entry_count({400, 400, 400}), std::length_error);
  CHECK(mmot::checked_entry_count({64, 64, 64}) == 262144);
}

TEST_CASE("zero-size axes are rejected") {
  CHECK_THROWS_AS(Tensor({3, 0, 2}), std::invalid_argument);
}

TEST_SUITE_END();
