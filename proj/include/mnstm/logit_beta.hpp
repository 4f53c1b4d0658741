#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "mnstm/rng.hpp"

namespace mnstm {

// Shapes of a logit-transformed Beta variable q = logit(g),
// g ~ Beta(alpha, kappa - alpha). Parameterized by (alpha, kappa) with
// kappa > alpha > 0 so that both Beta shapes stay positive.
struct LogitBetaParams {
  double alpha = 1.0;
  double kappa = 2.0;

  void validate() const;
};

// One draw. Computed as log G1 - log G2 with G1 ~ Gamma(alpha),
// G2 ~ Gamma(kappa - alpha); logit(G1/(G1+G2)) = log(G1/G2), which avoids
// Beta draws collapsing to 0/1 under small shapes.
double logit_beta_draw(const LogitBetaParams& params, Rng& rng);

Eigen::VectorXd logit_beta_sample(const LogitBetaParams& params, int n,
                                  std::uint64_t rng_seed);

double logit_beta_logpdf(double q, const LogitBetaParams& params);

// Exact mean and variance, digamma/trigamma differences.
double logit_beta_mean(const LogitBetaParams& params);
double logit_beta_variance(const LogitBetaParams& params);

}  // namespace mnstm
