#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>
#include <mmot/costs.hpp>
#include <mmot/harness.hpp>
#include <mmot/measures.hpp>

using namespace mmot;

namespace {

// A table whose gaps follow gap = eps * (C log(1/eps) + b) exactly.
RateTable synthetic_table(double C, double b, const std::vector<double>& eps_list,
                          double noise_amp = 0.0, unsigned seed = 0) {
  RateTable t;
  t.mot_0 = 0.25;
  t.cost_scale = 1.0;
  unsigned state = seed * 2654435761u + 1u;
  auto noise = [&]() {
    state = state * 1664525u + 1013904223u;
    return noise_amp * (2.0 * (state / 4294967296.0) - 1.0);
  };
  for (double eps : eps_list) {
    RateRow r;
    r.epsilon = eps;
    r.gap = eps * (C * std::log(1.0 / eps) + b + noise());
    r.mot_0 = t.mot_0;
    r.mot_eps = t.mot_0 + r.gap;
    r.sweeps = 10;
    r.marginal_error = 1e-10;
    r.converged = true;
    t.rows.push_back(r);
  }
  return t;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size()))
    ++n;
  return n;
}

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("fit recovers exact synthetic coefficients") {
  const std::vector<double> eps = {0.4, 0.3, 0.2, 0.14, 0.1, 0.07, 0.05, 0.03, 0.02};
  auto t = synthetic_table(0.7, 0.35, eps);
  auto fit = fit_rate(t, {0.02, 0.4});
  CHECK(std::fabs(fit.C - 0.7) <= 1e-10);
  CHECK(std::fabs(fit.b - 0.35) <= 1e-10);
  CHECK(fit.residual_rms <= 1e-12);
  CHECK(fit.rows_used == eps.size());
  // The default window on cost_scale = 1 covers the same rows.
  auto fit2 = fit_rate(t);
  CHECK(std::fabs(fit2.C - 0.7) <= 1e-10);
}

TEST_CASE("fit tolerates small multiplicative noise") {
  const std::vector<double> eps = {0.4, 0.3, 0.2, 0.14, 0.1, 0.07, 0.05, 0.03, 0.02};
  auto t = synthetic_table(0.5, 0.1, eps, 1e-6, 42);
  auto fit = fit_rate(t, {0.02, 0.4});
  CHECK(std::fabs(fit.C - 0.5) <= 1e-3);
  CHECK(std::fabs(fit.b - 0.1) <= 1e-3);
}

TEST_CASE("fit filters the window, the gap floor and non-converged rows") {
  const std::vector<double> eps = {0.8, 0.4, 0.3, 0.2, 0.14, 0.1, 0.07, 0.012};
  auto t = synthetic_table(0.6, 0.2, eps);
  t.rows[1].converged = false;       // 0.4 dropped by flag
  t.rows.back().gap = 5e-8;          // 0.012 would be window-dropped anyway
  auto fit = fit_rate(t, {0.02, 0.4});
  CHECK(fit.rows_used == 5);         // 0.3, 0.2, 0.14, 0.1, 0.07
  CHECK(std::fabs(fit.C - 0.6) <= 1e-10);

  auto tiny = synthetic_table(0.6, 0.2, {0.3, 0.2, 0.1});
  CHECK_THROWS_AS(fit_rate(tiny, {0.02, 0.4}), std::runtime_error);
}

TEST_CASE("compare_bounds fills the sandwich verdict") {
  RateFit fit;
  fit.C = 0.5;
  fit = compare_bounds(fit, {1, 1}, 1, 0.3);
  CHECK(fit.lower_bound == 0.5);
  CHECK(fit.upper_bound == 0.5);
  CHECK(fit.pass_lower);
  CHECK(fit.pass_upper);
  CHECK(fit.matching);  // kappa equals sum d_i - max d_i

  fit.C = 0.95;
  fit = compare_bounds(fit, {1, 1}, 1, 0.3);
  CHECK(fit.pass_lower);
  CHECK(!fit.pass_upper);

  fit.C = 0.1;
  fit = compare_bounds(fit, {1, 1}, 1, 0.3);
  CHECK(!fit.pass_lower);
  CHECK(fit.pass_upper);

  fit.C = 1.2;
  fit = compare_bounds(fit, {2, 2, 2}, 2, 0.3);
  CHECK(fit.lower_bound == 1.0);
  CHECK(fit.upper_bound == 2.0);
  CHECK(fit.pass_lower);
  CHECK(fit.pass_upper);
  CHECK(!fit.matching);  // kappa 2 < bound 4

  CHECK_THROWS_AS(compare_bounds(fit, {}, 1, 0.3), std::invalid_argument);
}

TEST_CASE("rate sweep produces a monotone nonnegative gap table") {
  auto mu = grid_marginal({0.0}, {1.0}, 16, "uniform");
  auto nu = grid_marginal({0.0}, {1.0}, 16, "cos2");
  auto space = make_space({mu, nu});
  auto cost = evaluate_on_grid(make_quadratic2(1), space);
  const std::vector<double> eps = {0.3, 0.2, 0.12, 0.08, 0.05, 0.03};
  auto table = rate_sweep(space, cost, eps);
  REQUIRE(table.rows.size() == eps.size());
  double prev_gap = 1e300;
  for (const auto& r : table.rows) {
    CHECK(r.converged);
    CHECK(r.gap >= -1e-7);
    CHECK(r.gap <= prev_gap + 1e-7);
    CHECK(r.marginal_error <= 1e-9);
    prev_gap = r.gap;
  }
  CHECK(table.cost_scale == doctest::Approx(0.9375 * 0.9375).epsilon(1e-12));

  auto fit = fit_rate(table, {0.03, 0.3});
  CHECK(fit.C > 0.05);
  CHECK(fit.C < 1.2);

  // Overriding MOT_0 with the same value reproduces the gaps.
  auto table2 = rate_sweep(space, cost, eps, {}, table.mot_0);
  for (std::size_t k = 0; k < eps.size(); ++k)
    CHECK(table2.rows[k].gap == doctest::Approx(table.rows[k].gap).epsilon(1e-12));

  // A wildly wrong override violates the gap sign check.
  CHECK_THROWS_AS(rate_sweep(space, cost, eps, {}, table.mot_0 + 10.0), std::runtime_error);
}

TEST_CASE("rate sweep demands an override above the LP guard") {
  auto mu = grid_marginal({0.0}, {1.0}, 700, "uniform");
  auto space = make_space({mu, mu});
  Tensor cost(space.shape());
  try {
    rate_sweep(space, cost, {0.3, 0.2, 0.1, 0.05});
    FAIL("expected a guard error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("override") != std::string::npos);
  }
}

TEST_CASE("emit_outputs writes parseable csv, json and svg") {
  const std::vector<double> eps = {0.4, 0.3, 0.2, 0.14, 0.1, 0.07, 0.05};
  auto t = synthetic_table(0.65, 0.2, eps);
  auto fit = compare_bounds(fit_rate(t, {0.05, 0.4}), {1, 1}, 1, 0.3);

  const std::string csv = "harness_test_out.csv";
  const std::string json = "harness_test_out.json";
  const std::string svg = "harness_test_out.svg";
  emit_outputs(t, fit, csv, json, svg);

  const std::string csv_text = slurp(csv);
  CHECK(csv_text.rfind("epsilon,mot_eps,mot_0,gap,sweeps,marginal_error\n", 0) == 0);
  CHECK(count_occurrences(csv_text, "\n") == eps.size() + 1);
  // Round-trip the first data row.
  std::istringstream first_row(csv_text.substr(csv_text.find('\n') + 1));
  std::string cell;
  std::getline(first_row, cell, ',');
  CHECK(std::stod(cell) == 0.4);
  std::getline(first_row, cell, ',');
  CHECK(std::stod(cell) == doctest::Approx(t.rows[0].mot_eps).epsilon(1e-15));

  auto j = nlohmann::json::parse(slurp(json));
  CHECK(j["C"].get<double>() == doctest::Approx(fit.C).epsilon(1e-12));
  CHECK(j["b"].get<double>() == doctest::Approx(fit.b).epsilon(1e-12));
  CHECK(j["lower_bound"].get<double>() == 0.5);
  CHECK(j["upper_bound"].get<double>() == 0.5);
  CHECK(j["pass_lower"].get<bool>());
  CHECK(j["pass_upper"].get<bool>());
  CHECK(j["matching"].get<bool>());
  CHECK(j["rows_used"].get<std::size_t>() == fit.rows_used);

  const std::string svg_text = slurp(svg);
  CHECK(svg_text.rfind("<svg", 0) == 0);
  CHECK(count_occurrences(svg_text, "<line") == 3);
  CHECK(count_occurrences(svg_text, "<circle") == eps.size());
  CHECK(svg_text.find("</svg>") != std::string::npos);
  CHECK(svg_text.find("fit slope=") != std::string::npos);

  // Empty paths write nothing and do not throw.
  CHECK_NOTHROW(emit_outputs(t, fit, "", "", ""));

  std::remove(csv.c_str());
  std::remove(json.c_str());
  std::remove(svg.c_str());
}

TEST_SUITE_END();
