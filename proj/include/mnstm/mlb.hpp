#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "mnstm/rng.hpp"

namespace mnstm {

// Multivariate logit-beta law of q = mu + V^{-1} w, where the components of
// w are independent logit-beta variables with shapes (alpha_i, kappa_i).
struct MlbParams {
  Eigen::VectorXd mu;
  Eigen::MatrixXd precision_factor;  // V, M x M invertible
  Eigen::VectorXd alpha;
  Eigen::VectorXd kappa;

  void validate() const;
  int dim() const { return static_cast<int>(mu.size()); }
};

double mlb_logpdf(const Eigen::VectorXd& q, const MlbParams& params);

// Unnormalized log density of the conditional form:
//   alpha'(H q1 - c) - kappa' log(1 + exp(H q1 - c)),
// with H tall of full column rank. Normalizing constants are never needed.
double conditional_mlb_logkernel(const Eigen::VectorXd& q1,
                                 const Eigen::VectorXd& c,
                                 const Eigen::MatrixXd& h,
                                 const Eigen::VectorXd& alpha,
                                 const Eigen::VectorXd& kappa);

// Orthonormal basis of the null space of H' (columns span {v : H'v = 0}),
// taken from the full QR of H. Column signs are fixed so the first entry
// of largest magnitude is positive, keeping results reproducible.
Eigen::MatrixXd null_space_basis(const Eigen::MatrixXd& h);

// Draws from the r-dimensional marginal of the joint MLB with precision
// factor (H, B) and location V^{-1} mu_star: each draw is
// (H'H)^{-1} H' (mu_star + w) with w a vector of independent logit-beta
// variables. Returns an n x r matrix, one draw per row.
Eigen::MatrixXd marginal_mlb_sample(const Eigen::MatrixXd& h_star,
                                    const Eigen::VectorXd& mu_star,
                                    const Eigen::VectorXd& alpha_star,
                                    const Eigen::VectorXd& kappa_star, int n,
                                    std::uint64_t rng_seed);

// Single draw with a caller-provided solver state; used by the samplers.
Eigen::VectorXd marginal_mlb_draw(const Eigen::MatrixXd& pinv_h,
                                  const Eigen::VectorXd& mu_star,
                                  const Eigen::VectorXd& alpha_star,
                                  const Eigen::VectorXd& kappa_star, Rng& rng);

}  // namespace mnstm
