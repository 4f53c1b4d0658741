#include <doctest.h>

#include <cmath>
#include <limits>

#include "mnstm/ars.hpp"
#include "mnstm/rng.hpp"
#include "test_util.hpp"

using namespace mnstm;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("standard normal target") {
  Rng rng(1);
  auto kernel = [](double x) { return -0.5 * x * x; };
  std::vector<double> draws(20000);
  for (auto& d : draws) {
    d = sample_log_concave(kernel, -kInf, kInf, rng, "normal");
  }
  const double mean = testutil::sample_mean(draws);
  const double var = testutil::sample_variance(draws);
  CHECK(std::abs(mean) < 3.0 / std::sqrt(20000.0));
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("gamma(2,1) target on the positive axis") {
  Rng rng(2);
  auto kernel = [](double x) { return std::log(x) - x; };
  std::vector<double> draws(20000);
  for (auto& d : draws) {
    d = sample_log_concave(kernel, 0.0, kInf, rng, "gamma2");
    CHECK(d > 0.0);
  }
  const double mean = testutil::sample_mean(draws);
  // gamma(2,1): mean 2, variance 2
  CHECK(std::abs(mean - 2.0) < 3.0 * std::sqrt(2.0 / 20000.0) + 0.02);
}

TEST_CASE("truncated support is respected") {
  Rng rng(3);
  const double lower = 1.7;
  auto kernel = [](double x) { return 3.0 * std::log(x) - 2.0 * x; };
  for (int i = 0; i < 2000; ++i) {
    const double d = sample_log_concave(kernel, lower, kInf, rng, "shifted");
    CHECK(d > lower);
  }
}

TEST_CASE("bounded support target") {
  Rng rng(4);
  // Beta(3, 2) on (0, 1)
  auto kernel = [](double x) { return 2.0 * std::log(x) + std::log1p(-x); };
  std::vector<double> draws(20000);
  for (auto& d : draws) {
    d = sample_log_concave(kernel, 0.0, 1.0, rng, "beta32");
    CHECK(d > 0.0);
    CHECK(d < 1.0);
  }
  CHECK(testutil::sample_mean(draws) == doctest::Approx(0.6).epsilon(0.02));
}

TEST_CASE("non-log-concave targets are detected") {
  Rng rng(5);
  // modes close enough that the initial abscissae straddle the dip
  auto bimodal = [](double x) {
    const double a = std::exp(-0.5 * (x - 2.0) * (x - 2.0));
    const double b = std::exp(-0.5 * (x + 2.0) * (x + 2.0));
    return std::log(a + b);
  };
  CHECK_THROWS_WITH_AS(
      [&] {
        for (int i = 0; i < 500; ++i) {
          sample_log_concave(bimodal, -kInf, kInf, rng, "bimodal");
        }
      }(),
      doctest::Contains("bimodal"), std::runtime_error);
}

TEST_CASE("empty support is rejected") {
  Rng rng(6);
  auto kernel = [](double x) { return -x * x; };
  CHECK_THROWS_AS(sample_log_concave(kernel, 1.0, 1.0, rng),
                  std::invalid_argument);
}
