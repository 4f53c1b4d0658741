#include "mnstm/logit_beta.hpp"

#include <cmath>
#include <stdexcept>

#include "mnstm/special_functions.hpp"

namespace mnstm {

void LogitBetaParams::validate() const {
  if (!(alpha > 0.0) || !(kappa > alpha)) {
    throw std::invalid_argument(
        "LogitBetaParams: require kappa > alpha > 0");
  }
}

double logit_beta_draw(const LogitBetaParams& params, Rng& rng) {
  return rng.log_gamma(params.alpha) - rng.log_gamma(params.kappa - params.alpha);
}

Eigen::VectorXd logit_beta_sample(const LogitBetaParams& params, int n,
                                  std::uint64_t rng_seed) {
  params.validate();
  if (n < 1) {
    throw std::invalid_argument("logit_beta_sample: n must be >= 1");
  }
  Rng rng(rng_seed);
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = logit_beta_draw(params, rng);
  }
  return out;
}

double logit_beta_logpdf(double q, const LogitBetaParams& params) {
  params.validate();
  return -log_beta(params.alpha, params.kappa - params.alpha) +
         params.alpha * q - params.kappa * log1p_exp(q);
}

double logit_beta_mean(const LogitBetaParams& params) {
  params.validate();
  return digamma(params.alpha) - digamma(params.kappa - params.alpha);
}

double logit_beta_variance(const LogitBetaParams& params) {
  params.validate();
  return trigamma(params.alpha) + trigamma(params.kappa - params.alpha);
}

}  // namespace mnstm
