#include "mnstm/panel.hpp"

#include <cmath>
#include <stdexcept>

#include "mnstm/special_functions.hpp"

namespace mnstm {

CountPanel CountPanel::zeros(int k, int n, int t) {
  if (k < 2 || n < 1 || t < 1) {
    throw std::invalid_argument("CountPanel: require K >= 2, N >= 1, T >= 1");
  }
  CountPanel panel;
  panel.K = k;
  panel.N = n;
  panel.T = t;
  panel.counts.assign(static_cast<std::size_t>(k) * n * t, 0);
  panel.observed.assign(static_cast<std::size_t>(n) * t, 1);
  return panel;
}

std::int64_t CountPanel::total(int i, int t) const {
  std::int64_t m = 0;
  for (int k = 0; k < K; ++k) m += y(k, i, t);
  return m;
}

std::int64_t CountPanel::stick_trials(int k, int i, int t) const {
  std::int64_t n = total(i, t);
  for (int j = 0; j < k; ++j) n -= y(j, i, t);
  return n;
}

int CountPanel::observed_units(int t) const {
  int n_t = 0;
  for (int i = 0; i < N; ++i) {
    if (is_observed(i, t)) ++n_t;
  }
  return n_t;
}

std::int64_t CountPanel::component_count() const {
  std::int64_t sum = 0;
  for (int t = 0; t < T; ++t) sum += observed_units(t);
  return static_cast<std::int64_t>(K - 1) * sum;
}

void CountPanel::validate() const {
  if (K < 2 || N < 1 || T < 1) {
    throw std::invalid_argument("CountPanel: require K >= 2, N >= 1, T >= 1");
  }
  if (counts.size() != static_cast<std::size_t>(K) * N * T ||
      observed.size() != static_cast<std::size_t>(N) * T) {
    throw std::invalid_argument("CountPanel: storage size mismatch");
  }
  for (const auto c : counts) {
    if (c < 0) {
      throw std::invalid_argument("CountPanel: counts must be nonnegative");
    }
  }
}

Eigen::VectorXd stick_break_forward(const Eigen::VectorXd& pi) {
  const int k = static_cast<int>(pi.size());
  if (k < 2) {
    throw std::invalid_argument("stick_break_forward: need K >= 2");
  }
  double sum = 0.0;
  for (int j = 0; j < k; ++j) {
    if (!(pi[j] > 0.0 && pi[j] < 1.0)) {
      throw std::invalid_argument(
          "stick_break_forward: probabilities must lie in (0,1)");
    }
    sum += pi[j];
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("stick_break_forward: probabilities must sum to 1");
  }
  Eigen::VectorXd p(k - 1);
  double remaining = 1.0;
  for (int j = 0; j < k - 1; ++j) {
    p[j] = pi[j] / remaining;
    remaining -= pi[j];
  }
  return p;
}

Eigen::VectorXd stick_break_inverse(const Eigen::VectorXd& p) {
  const int km1 = static_cast<int>(p.size());
  if (km1 < 1) {
    throw std::invalid_argument("stick_break_inverse: need K >= 2");
  }
  for (int j = 0; j < km1; ++j) {
    if (!(p[j] > 0.0 && p[j] < 1.0)) {
      throw std::invalid_argument(
          "stick_break_inverse: probabilities must lie in (0,1)");
    }
  }
  Eigen::VectorXd pi(km1 + 1);
  double remaining = 1.0;
  for (int j = 0; j < km1; ++j) {
    pi[j] = remaining * p[j];
    remaining -= pi[j];
  }
  pi[km1] = remaining;
  return pi;
}

double multinomial_logpmf_factored(const std::vector<std::int64_t>& y,
                                   std::int64_t m, const Eigen::VectorXd& nu) {
  const int k = static_cast<int>(y.size());
  if (k < 2 || nu.size() != k - 1) {
    throw std::invalid_argument("multinomial_logpmf_factored: dimension mismatch");
  }
  std::int64_t sum = 0;
  for (const auto v : y) sum += v;
  if (sum != m) {
    throw std::invalid_argument(
        "multinomial_logpmf_factored: counts do not sum to the total");
  }
  double out = 0.0;
  std::int64_t trials = m;
  for (int j = 0; j < k - 1; ++j) {
    const double nj = static_cast<double>(trials);
    const double yj = static_cast<double>(y[j]);
    out += log_choose(nj, yj) + yj * nu[j] - nj * log1p_exp(nu[j]);
    trials -= y[j];
  }
  return out;
}

}  // namespace mnstm
