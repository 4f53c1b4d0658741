#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace mnstm {

// Symmetric 0/1 adjacency over areal units (or over the blocked
// (K-1)-layer expansion of them).
struct Adjacency {
  Eigen::MatrixXd edges;

  int n_nodes() const { return static_cast<int>(edges.rows()); }
  void validate() const;

  // Block-diagonal replication across `copies` category layers; no
  // cross-layer edges.
  Adjacency expand_blocks(int copies) const;
};

// Orthonormal basis of the column space of x (rank-revealing; dependent
// columns dropped). Used to feed rank-deficient covariate slices into the
// Moran operator, whose projector only depends on the column space.
Eigen::MatrixXd orth_basis(const Eigen::MatrixXd& x);

// (I - P_X) A (I - P_X) with P_X the projector onto col(X).
Eigen::MatrixXd moran_operator(const Eigen::MatrixXd& x, const Adjacency& adj);

// First r eigenvectors of the Moran operator, eigenvalues descending,
// deterministic column signs. Columns are orthonormal and orthogonal to
// col(x_pred). Records a warning when r exceeds the positive-eigenvalue
// count.
Eigen::MatrixXd mi_basis(const Eigen::MatrixXd& x_pred, const Adjacency& adj,
                         int r, std::vector<std::string>* warnings = nullptr);

// Share of Moran-operator variability captured by the leading r
// eigenvalues (positive part).
double mi_energy_fraction(const Eigen::MatrixXd& x_pred, const Adjacency& adj,
                          int r);

// VAR(1) propagator from the covariate-orthogonal eigensystem of the
// weight matrix: eigenvectors of (I - P_Z) U (I - P_Z) with
// Z = phi_pred' x_pred. A spread-less spectrum (which includes the
// no-covariate case) yields the identity propagator plus a warning.
Eigen::MatrixXd mi_propagator(const Eigen::MatrixXd& phi_pred,
                              const Eigen::MatrixXd& x_pred,
                              const Eigen::MatrixXd& u_weight,
                              std::vector<std::string>* warnings = nullptr);

struct StabilityReport {
  double rho = 0.0;
  Eigen::VectorXd partial_sums;  // prefix sums of trace(B_k' B_k)
  double limit = 0.0;            // r / (1 - rho^2)
  bool converged = false;
};

// Accumulates the squared-propagator traces of the moving-average
// expansion of the VAR(1): term k equals r * rho^{2(k-1)} for orthonormal
// propagators, so the partial sums approach r / (1 - rho^2).
StabilityReport stability_analysis(
    const std::vector<Eigen::MatrixXd>& psi_seq, double rho, int horizon,
    double tolerance = 1e-6);

// Frobenius-nearest positive semidefinite matrix: symmetrize then clip
// negative eigenvalues.
Eigen::MatrixXd positive_approximant(const Eigen::MatrixXd& c);

struct PrecisionSolve {
  Eigen::MatrixXd v;
  double sigma_eta_sq = 0.0;
};

// Precision factor closest (in Frobenius norm, through the basis
// coordinates) to the target precision P: V = Lambda^{1/2} Psi' from the
// spectral decomposition of the positive approximant of
// phi_pred' P phi_pred - phi_obs' phi_obs. sigma_eta_sq is
// trigamma(alpha) + trigamma(kappa - alpha).
PrecisionSolve solve_precision_factor(const Eigen::MatrixXd& phi_pred,
                                      const Eigen::MatrixXd& phi_obs,
                                      const Eigen::MatrixXd& p_target,
                                      double alpha_t, double kappa_t);

}  // namespace mnstm
