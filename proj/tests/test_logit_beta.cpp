#include <doctest.h>

#include <cmath>

#include "mnstm/logit_beta.hpp"
#include "mnstm/special_functions.hpp"
#include "test_util.hpp"

using namespace mnstm;

TEST_CASE("sample moments of the symmetric case") {
  // Beta(1,1) on the logit scale is standard logistic: mean 0,
  // variance pi^2/3.
  const int n = 1000000;
  const Eigen::VectorXd draws = logit_beta_sample({1.0, 2.0}, n, 12345);
  std::vector<double> v(draws.data(), draws.data() + n);
  const double mean = testutil::sample_mean(v);
  const double var = testutil::sample_variance(v);
  const double se = std::sqrt(var / n);
  CHECK(std::abs(mean) < 3.0 * se);
  const double target = 9.869604401089358 / 3.0;
  CHECK(std::abs(var - target) / target < 0.02);
}

TEST_CASE("sample mean matches the digamma difference") {
  const int n = 1000000;
  const LogitBetaParams params{2.0, 5.0};
  const Eigen::VectorXd draws = logit_beta_sample(params, n, 777);
  std::vector<double> v(draws.data(), draws.data() + n);
  const double mean = testutil::sample_mean(v);
  const double expected = digamma(2.0) - digamma(3.0);
  const double se = std::sqrt(logit_beta_variance(params) / n);
  CHECK(std::abs(mean - expected) < 3.0 * se);
  // variance against the trigamma sum
  const double var = testutil::sample_variance(v);
  const double var_expected = trigamma(2.0) + trigamma(3.0);
  CHECK(std::abs(var - var_expected) / var_expected < 0.02);
}

TEST_CASE("log density values") {
  CHECK(logit_beta_logpdf(0.0, {1.0, 2.0}) ==
        doctest::Approx(-2.0 * std::log(2.0)).epsilon(1e-14));
  // asymptotic tail: alpha q - kappa q for large q, no overflow
  const double tail = logit_beta_logpdf(50.0, {1.0, 2.0});
  CHECK(std::isfinite(tail));
  CHECK(tail == doctest::Approx(50.0 - 100.0).epsilon(1e-10));
}

TEST_CASE("density integrates to one") {
  for (const LogitBetaParams params : {LogitBetaParams{1.0, 2.0},
                                       LogitBetaParams{2.0, 5.0},
                                       LogitBetaParams{0.3, 1.1}}) {
    const double mass = testutil::simpson(
        [&](double q) { return std::exp(logit_beta_logpdf(q, params)); },
        -300.0, 300.0, 60000);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("tiny shapes stay finite") {
  const Eigen::VectorXd draws = logit_beta_sample({0.004, 0.4}, 20000, 5);
  for (int i = 0; i < draws.size(); ++i) {
    CHECK(std::isfinite(draws[i]));
  }
}

TEST_CASE("parameter domain") {
  CHECK_THROWS_AS(logit_beta_sample({0.0, 1.0}, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(logit_beta_sample({2.0, 2.0}, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(logit_beta_sample({1.0, 2.0}, 0, 1), std::invalid_argument);
}
