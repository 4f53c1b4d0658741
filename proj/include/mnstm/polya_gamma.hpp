#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "mnstm/rng.hpp"

namespace mnstm {

// Polya-Gamma variable built from its series definition,
//   omega = (1 / (2 pi^2)) sum_k g_k / (k - 1/2)^2,  g_k ~ Gamma(b, 1) iid,
// truncated after `truncation` terms. The truncated tail has mean
// b/(2 pi^2) * sum_{k > K} (k - 1/2)^{-2} <= b/(2 pi^2 K), under 0.03% of
// the total mean at the default K = 200.
struct PolyaGammaParams {
  double b = 1.0;
  int truncation = 200;

  void validate() const;
};

double polya_gamma_draw(const PolyaGammaParams& params, Rng& rng);

Eigen::VectorXd polya_gamma_sample(const PolyaGammaParams& params, int n,
                                   std::uint64_t rng_seed);

// Monte Carlo check of the logistic-to-Gaussian mixture identity
//   exp(a h) / (1 + exp(h))^b
//     = 2^{-b} exp((a - b/2) h) E[exp(-omega h^2 / 2)],
// omega ~ PG(b). Returns |lhs - rhs| / lhs.
double verify_pg_identity(double a, double b, double h, int n_mc,
                          std::uint64_t rng_seed, int truncation = 200);

// Same check against a precomputed set of omega draws (shared across grid
// points with equal b).
double verify_pg_identity_with_draws(double a, double b, double h,
                                     const Eigen::VectorXd& omega_draws);

}  // namespace mnstm
