#include "mnstm/moran.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "mnstm/special_functions.hpp"

namespace mnstm {

namespace {

void fix_column_signs(Eigen::MatrixXd& m) {
  for (int j = 0; j < m.cols(); ++j) {
    for (int i = 0; i < m.rows(); ++i) {
      if (std::abs(m(i, j)) > 1e-10) {
        if (m(i, j) < 0.0) m.col(j) = -m.col(j);
        break;
      }
    }
  }
}

// Symmetric eigendecomposition with eigenvalues sorted descending and the
// deterministic sign rule applied to eigenvectors.
void eig_descending(const Eigen::MatrixXd& s, Eigen::VectorXd& values,
                    Eigen::MatrixXd& vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  const int n = static_cast<int>(s.rows());
  values.resize(n);
  vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    values[i] = solver.eigenvalues()[n - 1 - i];
    vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  fix_column_signs(vectors);
}

}  // namespace

void Adjacency::validate() const {
  const int n = n_nodes();
  if (edges.cols() != n) {
    throw std::invalid_argument("Adjacency: matrix must be square");
  }
  for (int i = 0; i < n; ++i) {
    if (edges(i, i) != 0.0) {
      throw std::invalid_argument("Adjacency: diagonal must be zero");
    }
    for (int j = 0; j < n; ++j) {
      const double v = edges(i, j);
      if (v != 0.0 && v != 1.0) {
        throw std::invalid_argument("Adjacency: entries must be 0 or 1");
      }
      if (v != edges(j, i)) {
        throw std::invalid_argument("Adjacency: matrix must be symmetric");
      }
    }
  }
}

Adjacency Adjacency::expand_blocks(int copies) const {
  if (copies < 1) {
    throw std::invalid_argument("Adjacency::expand_blocks: copies must be >= 1");
  }
  const int n = n_nodes();
  Adjacency out;
  out.edges = Eigen::MatrixXd::Zero(n * copies, n * copies);
  for (int c = 0; c < copies; ++c) {
    out.edges.block(c * n, c * n, n, n) = edges;
  }
  return out;
}

Eigen::MatrixXd orth_basis(const Eigen::MatrixXd& x) {
  if (x.cols() == 0) {
    return Eigen::MatrixXd(x.rows(), 0);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());
  Eigen::MatrixXd q = qr.householderQ() *
                      Eigen::MatrixXd::Identity(x.rows(), rank);
  fix_column_signs(q);
  return q;
}

Eigen::MatrixXd moran_operator(const Eigen::MatrixXd& x, const Adjacency& adj) {
  adj.validate();
  const int n = adj.n_nodes();
  if (x.rows() != n) {
    throw std::invalid_argument("moran_operator: dimension mismatch");
  }
  Eigen::MatrixXd proj_complement = Eigen::MatrixXd::Identity(n, n);
  if (x.cols() > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < x.cols()) {
      throw std::invalid_argument("moran_operator: X is rank deficient");
    }
    Eigen::MatrixXd q = qr.householderQ() *
                        Eigen::MatrixXd::Identity(n, x.cols());
    proj_complement -= q * q.transpose();
  }
  return proj_complement * adj.edges * proj_complement;
}

Eigen::MatrixXd mi_basis(const Eigen::MatrixXd& x_pred, const Adjacency& adj,
                         int r, std::vector<std::string>* warnings) {
  adj.validate();
  const int n = adj.n_nodes();
  if (x_pred.rows() != n) {
    throw std::invalid_argument("mi_basis: dimension mismatch");
  }
  // Work inside the orthogonal complement of col(X): the operator spectrum
  // is unchanged there and every returned column is exactly
  // covariate-orthogonal, including any zero-eigenvalue directions.
  const Eigen::MatrixXd xq = orth_basis(x_pred);
  const int p = static_cast<int>(xq.cols());
  if (r < 1 || r > n - p) {
    throw std::invalid_argument(
        "mi_basis: r must lie in [1, n - rank(X)] = [1, " +
        std::to_string(n - p) + "]");
  }
  Eigen::MatrixXd complement;
  if (p == 0) {
    complement = Eigen::MatrixXd::Identity(n, n);
  } else {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(xq);
    complement =
        (qr.householderQ() * Eigen::MatrixXd::Identity(n, n)).rightCols(n - p);
  }
  const Eigen::MatrixXd restricted =
      complement.transpose() * adj.edges * complement;
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  eig_descending(0.5 * (restricted + restricted.transpose()), values, vectors);
  int positive = 0;
  for (int i = 0; i < values.size(); ++i) {
    if (values[i] > 1e-10) ++positive;
  }
  if (r > positive && warnings != nullptr) {
    warnings->push_back("mi_basis: requested rank " + std::to_string(r) +
                        " exceeds the " + std::to_string(positive) +
                        " positive eigenvalues of the Moran operator");
  }
  Eigen::MatrixXd basis = complement * vectors.leftCols(r);
  fix_column_signs(basis);
  return basis;
}

double mi_energy_fraction(const Eigen::MatrixXd& x_pred, const Adjacency& adj,
                          int r) {
  const Eigen::MatrixXd op = moran_operator(x_pred, adj);
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  eig_descending(0.5 * (op + op.transpose()), values, vectors);
  double total = 0.0;
  double head = 0.0;
  for (int i = 0; i < values.size(); ++i) {
    const double v = std::max(values[i], 0.0);
    total += v;
    if (i < r) head += v;
  }
  return total > 0.0 ? head / total : 0.0;
}

Eigen::MatrixXd mi_propagator(const Eigen::MatrixXd& phi_pred,
                              const Eigen::MatrixXd& x_pred,
                              const Eigen::MatrixXd& u_weight,
                              std::vector<std::string>* warnings) {
  const int r = static_cast<int>(phi_pred.cols());
  if (u_weight.rows() != r || u_weight.cols() != r) {
    throw std::invalid_argument("mi_propagator: weight must be r x r");
  }
  if (phi_pred.rows() != x_pred.rows()) {
    throw std::invalid_argument("mi_propagator: dimension mismatch");
  }
  if (u_weight.cwiseAbs().maxCoeff() < 1e-14) {
    throw std::invalid_argument("mi_propagator: zero weight matrix");
  }
  const Eigen::MatrixXd z = phi_pred.transpose() * x_pred;  // r x p
  Eigen::MatrixXd proj_complement = Eigen::MatrixXd::Identity(r, r);
  const Eigen::MatrixXd zq = orth_basis(z);
  if (zq.cols() > 0) {
    proj_complement -= zq * zq.transpose();
  }
  Eigen::MatrixXd s = proj_complement * u_weight * proj_complement;
  s = 0.5 * (s + s.transpose());
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  eig_descending(s, values, vectors);
  const double spread = values[0] - values[r - 1];
  if (spread < 1e-12 * std::max(1.0, std::abs(values[0]))) {
    if (warnings != nullptr) {
      warnings->push_back(
          "mi_propagator: eigensystem has no spread; using the identity "
          "propagator");
    }
    return Eigen::MatrixXd::Identity(r, r);
  }
  return vectors;
}

StabilityReport stability_analysis(
    const std::vector<Eigen::MatrixXd>& psi_seq, double rho, int horizon,
    double tolerance) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("stability_analysis: rho must lie in (0,1)");
  }
  if (psi_seq.empty() || horizon < 1) {
    throw std::invalid_argument("stability_analysis: empty input");
  }
  const int r = static_cast<int>(psi_seq.front().rows());
  for (const auto& psi : psi_seq) {
    if (psi.rows() != r || psi.cols() != r) {
      throw std::invalid_argument("stability_analysis: ragged psi sequence");
    }
    const double err =
        (psi.transpose() * psi - Eigen::MatrixXd::Identity(r, r))
            .cwiseAbs()
            .maxCoeff();
    if (err > 1e-8) {
      throw std::invalid_argument("stability_analysis: psi not orthonormal");
    }
  }

  StabilityReport report;
  report.rho = rho;
  report.limit = static_cast<double>(r) / (1.0 - rho * rho);
  report.partial_sums.resize(horizon);

  Eigen::MatrixXd product = Eigen::MatrixXd::Identity(r, r);
  double rho_pow = 1.0;  // rho^{k-1}
  double acc = 0.0;
  for (int k = 1; k <= horizon; ++k) {
    if (k > 1) {
      product = psi_seq[(k - 2) % psi_seq.size()] * product;
      rho_pow *= rho;
    }
    const double term =
        rho_pow * rho_pow * (product.transpose() * product).trace();
    acc += term;
    report.partial_sums[k - 1] = acc;
  }
  report.converged = std::abs(acc - report.limit) < tolerance;
  return report;
}

Eigen::MatrixXd positive_approximant(const Eigen::MatrixXd& c) {
  if (c.rows() != c.cols()) {
    throw std::invalid_argument("positive_approximant: matrix must be square");
  }
  const Eigen::MatrixXd sym = 0.5 * (c + c.transpose());
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  eig_descending(sym, values, vectors);
  Eigen::VectorXd clipped = values.cwiseMax(0.0);
  return vectors * clipped.asDiagonal() * vectors.transpose();
}

PrecisionSolve solve_precision_factor(const Eigen::MatrixXd& phi_pred,
                                      const Eigen::MatrixXd& phi_obs,
                                      const Eigen::MatrixXd& p_target,
                                      double alpha_t, double kappa_t) {
  if (!(alpha_t > 0.0) || !(kappa_t > alpha_t)) {
    throw std::invalid_argument(
        "solve_precision_factor: require kappa > alpha > 0");
  }
  const int r = static_cast<int>(phi_pred.cols());
  if (phi_obs.cols() != r || p_target.rows() != phi_pred.rows() ||
      p_target.cols() != phi_pred.rows()) {
    throw std::invalid_argument("solve_precision_factor: dimension mismatch");
  }
  const Eigen::MatrixXd target_coords =
      phi_pred.transpose() * p_target * phi_pred -
      phi_obs.transpose() * phi_obs;
  const Eigen::MatrixXd sigma_star = positive_approximant(target_coords);
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  eig_descending(sigma_star, values, vectors);
  Eigen::VectorXd roots = values.cwiseMax(0.0).cwiseSqrt();

  PrecisionSolve out;
  out.v = roots.asDiagonal() * vectors.transpose();
  out.sigma_eta_sq = trigamma(alpha_t) + trigamma(kappa_t - alpha_t);
  return out;
}

}  // namespace mnstm
