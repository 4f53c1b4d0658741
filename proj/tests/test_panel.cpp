#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mnstm/panel.hpp"
#include "mnstm/rng.hpp"
#include "mnstm/special_functions.hpp"
#include "test_util.hpp"

using namespace mnstm;

namespace {

// Direct multinomial log pmf, the reference the factorization must equal.
double direct_multinomial(const std::vector<std::int64_t>& y, std::int64_t m,
                          const Eigen::VectorXd& pi) {
  double out = std::lgamma(static_cast<double>(m) + 1.0);
  for (std::size_t k = 0; k < y.size(); ++k) {
    out -= std::lgamma(static_cast<double>(y[k]) + 1.0);
    out += static_cast<double>(y[k]) * std::log(pi[k]);
  }
  return out;
}

// All count vectors over K categories summing to m.
void enumerate_counts(int k, std::int64_t m,
                      std::vector<std::int64_t>& current,
                      std::vector<std::vector<std::int64_t>>& out) {
  if (static_cast<int>(current.size()) == k - 1) {
    std::int64_t used = std::accumulate(current.begin(), current.end(),
                                        static_cast<std::int64_t>(0));
    current.push_back(m - used);
    out.push_back(current);
    current.pop_back();
    return;
  }
  std::int64_t used = std::accumulate(current.begin(), current.end(),
                                      static_cast<std::int64_t>(0));
  for (std::int64_t v = 0; v <= m - used; ++v) {
    current.push_back(v);
    enumerate_counts(k, m, current, out);
    current.pop_back();
  }
}

Eigen::VectorXd random_simplex(int k, Rng& rng) {
  Eigen::VectorXd pi(k);
  double total = 0.0;
  for (int j = 0; j < k; ++j) {
    pi[j] = rng.gamma(1.0) + 1e-3;
    total += pi[j];
  }
  pi /= total;
  return pi;
}

Eigen::VectorXd logits_of(const Eigen::VectorXd& pi) {
  return stick_break_forward(pi).unaryExpr(
      [](double p) { return mnstm::logit(p); });
}

}  // namespace

TEST_CASE("forward stick probabilities") {
  Eigen::VectorXd two(2);
  two << 0.3, 0.7;
  const Eigen::VectorXd p2 = stick_break_forward(two);
  REQUIRE(p2.size() == 1);
  CHECK(p2[0] == doctest::Approx(0.3).epsilon(1e-15));

  Eigen::VectorXd three(3);
  three << 0.2, 0.3, 0.5;
  const Eigen::VectorXd p3 = stick_break_forward(three);
  CHECK(p3[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(p3[1] == doctest::Approx(0.375).epsilon(1e-15));

  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  const Eigen::VectorXd pu = stick_break_forward(uniform);
  CHECK(pu[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(pu[1] == doctest::Approx(0.5).epsilon(1e-14));

  Eigen::VectorXd off(2);
  off << 0.3, 0.6;
  CHECK_THROWS_AS(stick_break_forward(off), std::invalid_argument);
}

TEST_CASE("inverse stick probabilities") {
  Eigen::VectorXd p(2);
  p << 0.2, 0.375;
  const Eigen::VectorXd pi = stick_break_inverse(p);
  CHECK(pi[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(pi[1] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(pi[2] == doctest::Approx(0.5).epsilon(1e-15));

  Eigen::VectorXd half(1);
  half << 0.5;
  const Eigen::VectorXd even = stick_break_inverse(half);
  CHECK(even[0] == doctest::Approx(0.5));
  CHECK(even[1] == doctest::Approx(0.5));
}

TEST_CASE("inverse of forward is the identity on the simplex") {
  Rng rng(15);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + static_cast<int>(rng.uniform() * 4);
    const Eigen::VectorXd pi = random_simplex(k, rng);
    const Eigen::VectorXd back = stick_break_inverse(stick_break_forward(pi));
    CHECK((back - pi).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(back.sum() == doctest::Approx(1.0).epsilon(1e-13));
    for (int j = 0; j < k; ++j) {
      CHECK(back[j] > 0.0);
      CHECK(back[j] < 1.0);
    }
  }
}

TEST_CASE("two categories reduce to the binomial pmf") {
  const Eigen::VectorXd nu = Eigen::VectorXd::Constant(1, 0.4);
  const double p = sigmoid(0.4);
  for (std::int64_t y = 0; y <= 6; ++y) {
    const double lhs = multinomial_logpmf_factored({y, 6 - y}, 6, nu);
    const double rhs = log_choose(6, static_cast<double>(y)) +
                       y * std::log(p) + (6 - y) * std::log1p(-p);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
  }
}

TEST_CASE("pmf sums to one over the outcome lattice") {
  Rng rng(25);
  const Eigen::VectorXd pi = random_simplex(3, rng);
  const Eigen::VectorXd nu = logits_of(pi);
  std::vector<std::vector<std::int64_t>> outcomes;
  std::vector<std::int64_t> current;
  enumerate_counts(3, 4, current, outcomes);
  double total = 0.0;
  for (const auto& y : outcomes) {
    total += std::exp(multinomial_logpmf_factored(y, 4, nu));
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("factored pmf equals the direct formula") {
  Rng rng(35);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + static_cast<int>(rng.uniform() * 3);
    const Eigen::VectorXd pi = random_simplex(k, rng);
    const Eigen::VectorXd nu = logits_of(pi);
    const std::int64_t m = 1 + static_cast<std::int64_t>(rng.uniform() * 30);
    // random outcome
    std::vector<std::int64_t> y(k, 0);
    for (std::int64_t draw = 0; draw < m; ++draw) {
      double u = rng.uniform();
      int cat = 0;
      while (cat + 1 < k && u > pi[cat]) {
        u -= pi[cat];
        ++cat;
      }
      ++y[cat];
    }
    const double factored = multinomial_logpmf_factored(y, m, nu);
    const double direct = direct_multinomial(y, m, pi);
    CHECK(factored == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("factorization identity exhaustively for K <= 4, m <= 6") {
  Rng rng(45);
  for (int k = 2; k <= 4; ++k) {
    const Eigen::VectorXd pi = random_simplex(k, rng);
    const Eigen::VectorXd nu = logits_of(pi);
    for (std::int64_t m = 0; m <= 6; ++m) {
      std::vector<std::vector<std::int64_t>> outcomes;
      std::vector<std::int64_t> current;
      enumerate_counts(k, m, current, outcomes);
      for (const auto& y : outcomes) {
        const double factored = multinomial_logpmf_factored(y, m, nu);
        const double direct = direct_multinomial(y, m, pi);
        CHECK(std::abs(std::exp(factored) - std::exp(direct)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("the factorization identity is ordering invariant") {
  // permuting categories changes the latent parameterization but not the
  // pmf value of a permuted outcome
  Rng rng(55);
  const Eigen::VectorXd pi = random_simplex(4, rng);
  const std::vector<std::int64_t> y{3, 1, 0, 2};
  const std::int64_t m = 6;
  const double base =
      multinomial_logpmf_factored(y, m, logits_of(pi));
  std::vector<int> perm{0, 1, 2, 3};
  for (int shuffle = 0; shuffle < 8; ++shuffle) {
    std::swap(perm[shuffle % 4], perm[(shuffle + 1) % 4]);
    Eigen::VectorXd pi_perm(4);
    std::vector<std::int64_t> y_perm(4);
    for (int j = 0; j < 4; ++j) {
      pi_perm[j] = pi[perm[j]];
      y_perm[j] = y[perm[j]];
    }
    const double value =
        multinomial_logpmf_factored(y_perm, m, logits_of(pi_perm));
    CHECK(value == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("count mismatch is rejected") {
  const Eigen::VectorXd nu = Eigen::VectorXd::Zero(1);
  CHECK_THROWS_AS(multinomial_logpmf_factored({2, 2}, 5, nu),
                  std::invalid_argument);
}

TEST_CASE("panel bookkeeping") {
  CountPanel panel = CountPanel::zeros(3, 2, 2);
  panel.y(0, 0, 0) = 4;
  panel.y(1, 0, 0) = 3;
  panel.y(2, 0, 0) = 1;
  panel.set_observed(1, 0, false);
  CHECK(panel.total(0, 0) == 8);
  CHECK(panel.stick_trials(0, 0, 0) == 8);
  CHECK(panel.stick_trials(1, 0, 0) == 4);
  CHECK(panel.observed_units(0) == 1);
  CHECK(panel.observed_units(1) == 2);
  CHECK(panel.component_count() == 2 * 3);
  panel.validate();
  panel.y(0, 0, 0) = -1;
  CHECK_THROWS_AS(panel.validate(), std::invalid_argument);
}
