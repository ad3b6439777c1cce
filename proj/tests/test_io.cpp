#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include <mmot/io.hpp>

using namespace mmot;

namespace {

const char* kFullConfig = R"json({
  "marginals": [
    {"grid": {"low": [0.0], "high": [1.0], "n_per_axis": 8, "density": "uniform"}},
    {"points": [[0.0], [0.5], [1.0]], "weights": [0.25, 0.5, 0.25]}
  ],
  "cost": {"name": "quadratic2"},
  "eps_list": [0.3, 0.2, 0.1],
  "epsilon": 0.05,
  "delta": 0.25,
  "slack": 0.4,
  "mot0_override": 0.0123,
  "fit_window": [0.02, 0.4],
  "seed": 99
})json";

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("parse_config reads every documented field") {
  auto cfg = parse_config(kFullConfig);
  REQUIRE(cfg.marginals.size() == 2);
  CHECK(cfg.marginals[0].size() == 8);
  CHECK(cfg.marginals[0].dim == 1);
  CHECK(cfg.marginals[1].size() == 3);
  CHECK(cfg.marginals[1].weights[1] == 0.5);
  CHECK(cfg.cost_name == "quadratic2");
  CHECK(cfg.eps_list == std::vector<double>{0.3, 0.2, 0.1});
  REQUIRE(cfg.epsilon.has_value());
  CHECK(*cfg.epsilon == 0.05);
  REQUIRE(cfg.delta.has_value());
  CHECK(*cfg.delta == 0.25);
  REQUIRE(cfg.slack.has_value());
  CHECK(*cfg.slack == 0.4);
  REQUIRE(cfg.mot0_override.has_value());
  CHECK(*cfg.mot0_override == 0.0123);
  REQUIRE(cfg.fit_window.has_value());
  CHECK(cfg.fit_window->first == 0.02);
  CHECK(cfg.fit_window->second == 0.4);
  CHECK(cfg.seed == 99);

  auto space = space_from_config(cfg);
  CHECK(space.arity() == 2);
  auto cost = cost_from_config(cfg, space);
  CHECK(cost.name == "quadratic2");
}

TEST_CASE("optional fields default sensibly") {
  auto cfg = parse_config(R"({
    "marginals": [
      {"points": [[0.0], [1.0]], "weights": [0.5, 0.5]},
      {"points": [[0.0], [1.0]], "weights": [0.5, 0.5]}
    ],
    "cost": {"name": "quadratic2"}
  })");
  CHECK(cfg.eps_list.empty());
  CHECK(!cfg.epsilon.has_value());
  CHECK(!cfg.delta.has_value());
  CHECK(!cfg.slack.has_value());
  CHECK(!cfg.mot0_override.has_value());
  CHECK(!cfg.fit_window.has_value());
  CHECK(cfg.seed == 0);
  // dim is inferred from the first point when absent.
  CHECK(cfg.marginals[0].dim == 1);
}

TEST_CASE("barycenter lambda flows through to the cost") {
  auto cfg = parse_config(R"({
    "marginals": [
      {"grid": {"low": [0.0], "high": [1.0], "n_per_axis": 4}},
      {"grid": {"low": [0.0], "high": [1.0], "n_per_axis": 4}},
      {"grid": {"low": [0.0], "high": [1.0], "n_per_axis": 4}}
    ],
    "cost": {"name": "barycenter", "lambda": [0.2, 0.3, 0.5]}
  })");
  CHECK(cfg.lambda == std::vector<double>{0.2, 0.3, 0.5});
  auto space = space_from_config(cfg);
  auto cost = cost_from_config(cfg, space);
  CHECK(cost.name == "barycenter");
  CHECK(cost.arity == 3);
}

TEST_CASE("grid density defaults to uniform") {
  auto cfg = parse_config(R"({
    "marginals": [
      {"grid": {"low": [0.0], "high": [1.0], "n_per_axis": 4}},
      {"grid": {"low": [0.0], "high": [1.0], "n_per_axis": 4, "density": "cos2"}}
    ],
    "cost": {"name": "quadratic2"}
  })");
  CHECK(cfg.marginals[0].weights[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(cfg.marginals[1].weights[0] < 0.25);  // cos2 puts less mass at the edge
}

TEST_CASE("malformed configs raise invalid_argument with context") {
  CHECK_THROWS_AS(parse_config("not json at all"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"cost": {"name": "quadratic2"}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({
    "marginals": [{"points": [[0.0]], "weights": [1.0]}],
    "cost": {"name": "quadratic2"}
  })"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({
    "marginals": [
      {"points": [[0.0], [1.0]], "weights": [0.5, 0.5]},
      {"points": [[0.0], [1.0]], "weights": [0.5, 0.5]}
    ]
  })"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({
    "marginals": [
      {"points": [[0.0], [1.0]], "weights": [0.5, 0.5]},
      {"points": [[0.0], [1.0]], "weights": [0.5, 0.5]}
    ],
    "cost": {"name": "quadratic2"},
    "fit_window": [0.1]
  })"),
                  std::invalid_argument);
}

TEST_CASE("load_config reads from disk and reports missing files") {
  const std::string path = "io_test_config.json";
  {
    std::ofstream f(path);
    f << kFullConfig;
  }
  auto cfg = load_config(path);
  CHECK(cfg.cost_name == "quadratic2");
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_config("definitely_missing_config.json"), std::runtime_error);
}

TEST_SUITE_END();
