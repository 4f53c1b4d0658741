#include "mnstm/polya_gamma.hpp"

#include <cmath>
#include <stdexcept>

#include "mnstm/special_functions.hpp"

namespace mnstm {

void PolyaGammaParams::validate() const {
  if (!(b > 0.0)) {
    throw std::invalid_argument("PolyaGammaParams: b must be positive");
  }
  if (truncation < 1) {
    throw std::invalid_argument("PolyaGammaParams: truncation must be >= 1");
  }
}

double polya_gamma_draw(const PolyaGammaParams& params, Rng& rng) {
  constexpr double two_pi_sq = 2.0 * 9.869604401089358;  // 2 pi^2
  double acc = 0.0;
  for (int k = 1; k <= params.truncation; ++k) {
    const double denom = (k - 0.5) * (k - 0.5);
    acc += rng.gamma(params.b) / denom;
  }
  return acc / two_pi_sq;
}

Eigen::VectorXd polya_gamma_sample(const PolyaGammaParams& params, int n,
                                   std::uint64_t rng_seed) {
  params.validate();
  if (n < 1) {
    throw std::invalid_argument("polya_gamma_sample: n must be >= 1");
  }
  Rng rng(rng_seed);
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = polya_gamma_draw(params, rng);
  }
  return out;
}

double verify_pg_identity_with_draws(double a, double b, double h,
                                     const Eigen::VectorXd& omega_draws) {
  if (omega_draws.size() < 1) {
    throw std::invalid_argument("verify_pg_identity: no draws supplied");
  }
  const double log_lhs = a * h - b * log1p_exp(h);
  // E[exp(-omega h^2 / 2)] averaged in log space for stability.
  const double half_h2 = 0.5 * h * h;
  double mean = 0.0;
  for (int i = 0; i < omega_draws.size(); ++i) {
    mean += std::exp(-omega_draws[i] * half_h2);
  }
  mean /= static_cast<double>(omega_draws.size());
  const double log_rhs = -b * std::log(2.0) + (a - 0.5 * b) * h + std::log(mean);
  return std::abs(std::exp(log_rhs - log_lhs) - 1.0);
}

double verify_pg_identity(double a, double b, double h, int n_mc,
                          std::uint64_t rng_seed, int truncation) {
  PolyaGammaParams params{b, truncation};
  const Eigen::VectorXd omega = polya_gamma_sample(params, n_mc, rng_seed);
  return verify_pg_identity_with_draws(a, b, h, omega);
}

}  // namespace mnstm
