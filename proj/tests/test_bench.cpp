#include <cmath>
#include <doctest.h>

#include "pddgsa/bench.hpp"
#include "pddgsa/errors.hpp"

using namespace pddgsa;

TEST_CASE("ishigami closed-form references") {
  Benchmark bm = ishigami_benchmark();
  CHECK(bm.exact_mean == doctest::Approx(3.5));
  CHECK(bm.exact_std == doctest::Approx(3.720832).epsilon(1e-6));
  CHECK(bm.exact_indices.at({0}) == doctest::Approx(0.313905).epsilon(1e-5));
  CHECK(bm.exact_indices.at({1}) == doctest::Approx(0.442411).epsilon(1e-5));
  CHECK(bm.exact_indices.at({0, 2}) == doctest::Approx(0.243684).epsilon(1e-5));
  CHECK(bm.exact_indices.at({2}) == 0.0);
  CHECK(bm.exact_indices.at({0, 1}) == 0.0);
  CHECK(bm.exact_indices.at({1, 2}) == 0.0);

  double sum = 0.0;
  for (const auto& [subset, s] : bm.exact_indices) sum += s;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));

  Eigen::VectorXd x(3);
  x << 0.5, -1.0, 2.0;
  double expected = std::sin(0.5) + 7.0 * std::sin(-1.0) * std::sin(-1.0) +
                    0.1 * 16.0 * std::sin(0.5);
  CHECK(bm.evaluate(x) == doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS(ishigami(Eigen::VectorXd::Zero(2)), config_error);
}

TEST_CASE("quadratic-trigonometric 15-input function") {
  OakleyCoefficients coeffs;
  coeffs.a1 = Eigen::VectorXd::LinSpaced(15, 1.0, 15.0);
  coeffs.a2 = Eigen::VectorXd::Constant(15, 2.0);
  coeffs.a3 = Eigen::VectorXd::Constant(15, 0.5);
  coeffs.m = Eigen::MatrixXd::Identity(15, 15);

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(15);
  CHECK(oakley_ohagan(zero, coeffs) == doctest::Approx(15.0 * 0.5));

  Eigen::VectorXd x = Eigen::VectorXd::Constant(15, 0.3);
  double expected = 0.3 * coeffs.a1.sum() + 2.0 * 15.0 * std::sin(0.3) +
                    0.5 * 15.0 * std::cos(0.3) + 15.0 * 0.09;
  CHECK(oakley_ohagan(x, coeffs) == doctest::Approx(expected).epsilon(1e-13));
  CHECK_THROWS_AS(oakley_ohagan(Eigen::VectorXd::Zero(3), coeffs), config_error);

  Benchmark bm = oakley_benchmark(coeffs);
  CHECK(bm.dims() == 15);
  CHECK(bm.distributions[0].kind == DistKind::Normal);
}

TEST_CASE("study config validation") {
  StudyConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.trials = 0;
  CHECK_THROWS_AS(cfg.validate(), config_error);
  cfg.trials = 5;
  cfg.lambdas = {1.5};
  CHECK_THROWS_AS(cfg.validate(), config_error);
  cfg.lambdas = {0.5};
  cfg.report_iterations = {-1};
  CHECK_THROWS_AS(cfg.validate(), config_error);
}

TEST_CASE("index naming is one-based") {
  CHECK(index_name({0}) == "S{1}");
  CHECK(index_name({0, 2}) == "S{1,3}");
}

TEST_CASE("overdetermined study recovers the Ishigami references") {
  StudyConfig cfg;
  cfg.order = 9;  // L = 136 < samples
  cfg.samples = 500;
  cfg.trials = 2;
  cfg.seed_base = 77;
  Benchmark bench = ishigami_benchmark();
  StudyResult result = run_study(cfg, bench);
  REQUIRE(result.rows.size() == 1);
  const StudyRowResult& row = result.row("least-squares");
  CHECK(row.per_trial.size() == 2);
  for (const auto& e : row.errors) {
    if (e.name == "mean" || e.name == "std") {
      CHECK(e.metrics.mean_relative < 0.02);
    } else if (e.reference > 0.0) {
      CHECK(e.metrics.mean_absolute < 0.02);
    } else {
      CHECK(e.metrics.mean_absolute < 0.01);
      CHECK(!e.metrics.relative_defined);
    }
  }
}

TEST_CASE("underdetermined study layout and determinism") {
  StudyConfig cfg;
  cfg.samples = 59;
  cfg.trials = 2;
  cfg.lambdas = {0.5};
  cfg.report_iterations = {0, 3};
  cfg.dmorph.max_iterations = 3;
  cfg.seed_base = 5;

  Benchmark bench = ishigami_benchmark();
  StudyResult r1 = run_study(cfg, bench);
  StudyResult r2 = run_study(cfg, bench);

  REQUIRE(r1.rows.size() == 3);
  CHECK(r1.rows[0].label == "dmorph lambda=0.5 iter=0");
  CHECK(r1.rows[1].label == "dmorph lambda=0.5 iter=3");
  CHECK(r1.rows[2].label == "lasso");

  for (std::size_t i = 0; i < r1.rows.size(); ++i) {
    for (const auto& [name, vals] : r1.rows[i].estimates) {
      const auto& other = r2.rows[i].estimates.at(name);
      REQUIRE(vals.size() == other.size());
      for (std::size_t k = 0; k < vals.size(); ++k) CHECK(vals[k] == other[k]);
    }
  }
  CHECK_THROWS_AS(r1.row("missing"), config_error);
}

TEST_CASE("single trial mean absolute error is a plain deviation") {
  StudyConfig cfg;
  cfg.order = 7;  // L = 85
  cfg.samples = 200;
  cfg.trials = 1;
  cfg.seed_base = 9;
  Benchmark bench = ishigami_benchmark();
  StudyResult result = run_study(cfg, bench);
  const StudyRowResult& row = result.row("least-squares");
  for (const auto& e : row.errors) {
    double est = row.estimates.at(e.name)[0];
    CHECK(e.metrics.mean_absolute == doctest::Approx(std::abs(e.reference - est)));
  }
}
