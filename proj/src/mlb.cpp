#include "mnstm/mlb.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "mnstm/logit_beta.hpp"
#include "mnstm/special_functions.hpp"

namespace mnstm {

void MlbParams::validate() const {
  const int m = dim();
  if (precision_factor.rows() != m || precision_factor.cols() != m ||
      alpha.size() != m || kappa.size() != m) {
    throw std::invalid_argument("MlbParams: inconsistent dimensions");
  }
  for (int i = 0; i < m; ++i) {
    if (!(alpha[i] > 0.0) || !(kappa[i] > alpha[i])) {
      throw std::invalid_argument(
          "MlbParams: require kappa > alpha > 0 elementwise");
    }
  }
}

double mlb_logpdf(const Eigen::VectorXd& q, const MlbParams& params) {
  params.validate();
  const int m = params.dim();
  if (q.size() != m) {
    throw std::invalid_argument("mlb_logpdf: dimension mismatch");
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(params.precision_factor);
  const double abs_det = std::abs(lu.determinant());
  if (!(abs_det > 0.0) || !std::isfinite(abs_det)) {
    throw std::runtime_error("mlb_logpdf: singular precision factor");
  }
  const Eigen::VectorXd z = params.precision_factor * (q - params.mu);
  double out = std::log(abs_det);
  for (int i = 0; i < m; ++i) {
    out += -log_beta(params.alpha[i], params.kappa[i] - params.alpha[i]) +
           params.alpha[i] * z[i] - params.kappa[i] * log1p_exp(z[i]);
  }
  return out;
}

double conditional_mlb_logkernel(const Eigen::VectorXd& q1,
                                 const Eigen::VectorXd& c,
                                 const Eigen::MatrixXd& h,
                                 const Eigen::VectorXd& alpha,
                                 const Eigen::VectorXd& kappa) {
  const int m = static_cast<int>(h.rows());
  if (q1.size() != h.cols() || c.size() != m || alpha.size() != m ||
      kappa.size() != m) {
    throw std::invalid_argument(
        "conditional_mlb_logkernel: dimension mismatch");
  }
  const Eigen::VectorXd z = h * q1 - c;
  double out = 0.0;
  for (int i = 0; i < m; ++i) {
    out += alpha[i] * z[i] - kappa[i] * log1p_exp(z[i]);
  }
  return out;
}

Eigen::MatrixXd null_space_basis(const Eigen::MatrixXd& h) {
  const int m = static_cast<int>(h.rows());
  const int r = static_cast<int>(h.cols());
  if (r > m) {
    throw std::invalid_argument("null_space_basis: H must be tall");
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(h);
  Eigen::MatrixXd q_full = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd r_mat = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  for (int j = 0; j < r; ++j) {
    if (std::abs(r_mat(j, j)) < 1e-12 * std::sqrt(static_cast<double>(m))) {
      throw std::invalid_argument("null_space_basis: H is rank deficient");
    }
  }
  Eigen::MatrixXd basis = q_full.rightCols(m - r);
  for (int j = 0; j < basis.cols(); ++j) {
    int imax = 0;
    basis.col(j).cwiseAbs().maxCoeff(&imax);
    if (basis(imax, j) < 0.0) {
      basis.col(j) = -basis.col(j);
    }
  }
  return basis;
}

Eigen::MatrixXd marginal_mlb_sample(const Eigen::MatrixXd& h_star,
                                    const Eigen::VectorXd& mu_star,
                                    const Eigen::VectorXd& alpha_star,
                                    const Eigen::VectorXd& kappa_star, int n,
                                    std::uint64_t rng_seed) {
  const int m = static_cast<int>(h_star.rows());
  const int r = static_cast<int>(h_star.cols());
  if (mu_star.size() != m || alpha_star.size() != m || kappa_star.size() != m) {
    throw std::invalid_argument("marginal_mlb_sample: dimension mismatch");
  }
  if (n < 1) {
    throw std::invalid_argument("marginal_mlb_sample: n must be >= 1");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(h_star);
  if (qr.rank() < r) {
    throw std::invalid_argument("marginal_mlb_sample: H* is rank deficient");
  }
  for (int i = 0; i < m; ++i) {
    if (!(alpha_star[i] > 0.0) || !(kappa_star[i] > alpha_star[i])) {
      throw std::invalid_argument(
          "marginal_mlb_sample: require kappa > alpha > 0 elementwise");
    }
  }
  Rng rng(rng_seed);
  Eigen::MatrixXd out(n, r);
  Eigen::VectorXd w(m);
  for (int d = 0; d < n; ++d) {
    for (int i = 0; i < m; ++i) {
      LogitBetaParams lb{alpha_star[i], kappa_star[i]};
      w[i] = mu_star[i] + logit_beta_draw(lb, rng);
    }
    out.row(d) = qr.solve(w).transpose();
  }
  return out;
}

Eigen::VectorXd marginal_mlb_draw(const Eigen::MatrixXd& pinv_h,
                                  const Eigen::VectorXd& mu_star,
                                  const Eigen::VectorXd& alpha_star,
                                  const Eigen::VectorXd& kappa_star, Rng& rng) {
  const int m = static_cast<int>(pinv_h.cols());
  Eigen::VectorXd w(m);
  for (int i = 0; i < m; ++i) {
    LogitBetaParams lb{alpha_star[i], kappa_star[i]};
    w[i] = mu_star[i] + logit_beta_draw(lb, rng);
  }
  return pinv_h * w;
}

}  // namespace mnstm
