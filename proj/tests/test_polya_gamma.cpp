#include <doctest.h>

#include <cmath>

#include "mnstm/polya_gamma.hpp"
#include "test_util.hpp"

using namespace mnstm;

TEST_CASE("mean matches the numeric derivative of the mixture identity") {
  // At small h the identity gives E[exp(-omega h^2/2)] = cosh(h/2)^{-b},
  // so E[omega] = 2 (1 - cosh(h/2)^{-b}) / h^2 + O(h^2). For b = 1 this is
  // 1/4.
  auto mean_from_identity = [](double b) {
    const double h = 1e-3;
    return 2.0 * (1.0 - std::pow(std::cosh(0.5 * h), -b)) / (h * h);
  };
  CHECK(mean_from_identity(1.0) == doctest::Approx(0.25).epsilon(1e-6));

  const int n = 1000000;
  const Eigen::VectorXd draws = polya_gamma_sample({1.0, 200}, n, 31);
  std::vector<double> v(draws.data(), draws.data() + n);
  const double mean = testutil::sample_mean(v);
  CHECK(std::abs(mean - mean_from_identity(1.0)) / 0.25 < 0.01);
}

TEST_CASE("truncation stability") {
  const int n = 400000;
  const Eigen::VectorXd a = polya_gamma_sample({1.0, 200}, n, 8);
  const Eigen::VectorXd b = polya_gamma_sample({1.0, 400}, n, 8);
  std::vector<double> va(a.data(), a.data() + n);
  std::vector<double> vb(b.data(), b.data() + n);
  const double ma = testutil::sample_mean(va);
  const double mb = testutil::sample_mean(vb);
  CHECK(std::abs(ma - mb) / mb < 0.001);
}

TEST_CASE("mean is additive in the tilt") {
  const int n = 400000;
  const Eigen::VectorXd one = polya_gamma_sample({1.0, 200}, n, 21);
  const Eigen::VectorXd two = polya_gamma_sample({2.0, 200}, n, 22);
  std::vector<double> v1(one.data(), one.data() + n);
  std::vector<double> v2(two.data(), two.data() + n);
  CHECK(testutil::sample_mean(v2) / testutil::sample_mean(v1) ==
        doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("mixture identity at h = 0 is deterministic") {
  const double rel = verify_pg_identity(1.0, 2.0, 0.0, 2000, 4);
  CHECK(rel < 1e-12);
}

TEST_CASE("mixture identity on selected points") {
  CHECK(verify_pg_identity(1.0, 2.0, 1.5, 1000000, 5) < 0.01);
  CHECK(verify_pg_identity(0.5, 1.0, -3.0, 1000000, 6) < 0.01);
}

TEST_CASE("parameter domain") {
  CHECK_THROWS_AS(polya_gamma_sample({0.0, 200}, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(polya_gamma_sample({1.0, 0}, 10, 1), std::invalid_argument);
}
