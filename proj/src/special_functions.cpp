#include "mnstm/special_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace mnstm {

double log1p_exp(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("logit: argument must lie in (0,1)");
  }
  return std::log(p) - std::log1p(-p);
}

namespace {

// Asymptotic expansions are applied after shifting the argument above 10
// with the downward recurrences psi(x) = psi(x+1) - 1/x and
// psi'(x) = psi'(x+1) + 1/x^2.
constexpr double kShiftThreshold = 10.0;

}  // namespace

double digamma(double x) {
  if (!(x > 0.0)) {
    throw std::invalid_argument("digamma: argument must be positive");
  }
  double acc = 0.0;
  while (x < kShiftThreshold) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // psi(x) ~ ln x - 1/(2x) - sum B_{2n} / (2n x^{2n})
  double series = std::log(x) - 0.5 * inv;
  series -= inv2 * (1.0 / 12.0
           - inv2 * (1.0 / 120.0
           - inv2 * (1.0 / 252.0
           - inv2 * (1.0 / 240.0
           - inv2 * (1.0 / 132.0
           - inv2 * (691.0 / 32760.0))))));
  return acc + series;
}

double trigamma(double x) {
  if (!(x > 0.0)) {
    throw std::invalid_argument("trigamma: argument must be positive");
  }
  double acc = 0.0;
  while (x < kShiftThreshold) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // psi'(x) ~ 1/x + 1/(2x^2) + sum B_{2n} / x^{2n+1}
  double series = inv + 0.5 * inv2;
  series += inv * inv2 * (1.0 / 6.0
           - inv2 * (1.0 / 30.0
           - inv2 * (1.0 / 42.0
           - inv2 * (1.0 / 30.0
           - inv2 * (5.0 / 66.0
           - inv2 * (691.0 / 2730.0))))));
  return acc + series;
}

double log_choose(double n, double k) {
  if (k < 0.0 || k > n) {
    throw std::invalid_argument("log_choose: require 0 <= k <= n");
  }
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace mnstm
