#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "mnstm/moran.hpp"
#include "mnstm/panel.hpp"

namespace mnstm {

// Prediction-grid row ordering: component (k, i) maps to row k*N + i.
inline int pred_row(int k, int i, int n_units) { return k * n_units + i; }

// Components that contribute a likelihood factor at time t: the (unit,
// time) cell is observed and the stick has at least one trial. Zero-trial
// sticks carry no information and are dropped from all stacked blocks.
std::vector<int> active_pred_rows(const CountPanel& panel, int t);

struct TimeBasis {
  Eigen::MatrixXd x_pred;            // (K-1)N x p covariates
  Eigen::MatrixXd phi_pred;          // (K-1)N x r, orthonormal columns
  Eigen::MatrixXd propagator;        // r x r M_t (unused at t = 0)
  Eigen::MatrixXd precision_factor;  // r x r V_t
  double sigma_eta_sq = 0.0;
};

struct BasisSystem {
  int rank = 0;
  std::vector<TimeBasis> times;

  void validate() const;  // orthonormality and confounding-free checks
};

// Per-time Moran basis, propagator and precision factor from a unit-level
// adjacency. The covariate slices may be rank deficient (shared time
// dummies); only their column spaces enter the operator. p_target defaults
// to I - A on the expanded graph.
BasisSystem build_basis_system(const CountPanel& panel,
                               const Adjacency& unit_adj,
                               const std::vector<Eigen::MatrixXd>& x_pred,
                               int r, double alpha0 = 1.0, double kappa0 = 2.0,
                               const Eigen::MatrixXd* p_target = nullptr,
                               std::vector<std::string>* warnings = nullptr);

// T = 1 system with an explicitly supplied basis (columns orthonormal,
// orthogonal to col(x_pred)) and identity precision factor.
BasisSystem make_direct_basis(const Eigen::MatrixXd& x_pred,
                              const Eigen::MatrixXd& phi_pred);

enum class EpsilonMode {
  kHalfSplit,       // likelihood tilt split as epsilon/2 + epsilon/2
  kEmpiricalBayes,  // count-matched second split
};

struct MnStmSpec {
  double sigma = 1.0;    // scale of the replicated design rows
  double rho = 0.9;      // likelihood split weight, in (0,1)
  double epsilon = 0.05; // positive tilt, keeps split shapes valid at y = 0
  EpsilonMode epsilon_mode = EpsilonMode::kHalfSplit;
  // When > 0, overrides the default delta = stick-trial vector.
  double delta_constant = 0.0;
  // Include the epsilon/delta row blocks in every prior. Switching them off
  // is only valid for degenerate conjugate configurations (no covariates,
  // no basis).
  bool regularized = true;

  // Gamma hyperpriors (shape, rate); the *_1 pair is the alpha prior and
  // the unsuffixed pair the truncated kappa prior.
  double a_beta = 1.0, tau_beta = 1.0, a_beta1 = 1.0, tau_beta1 = 1.0;
  double a_eta = 1.0, tau_eta = 1.0, a_eta1 = 1.0, tau_eta1 = 1.0;
  double a_xi = 1.0, tau_xi = 1.0, a_xi1 = 1.0, tau_xi1 = 1.0;

  bool fixed_shapes = false;  // freeze shape parameters at their init values
  double init_alpha = 1.0;
  double init_kappa = 2.0;

  void validate() const;
};

struct ShapeState {
  double alpha_beta = 1.0;
  double kappa_beta = 2.0;
  Eigen::VectorXd alpha_eta;  // T
  Eigen::VectorXd kappa_eta;  // T
  Eigen::VectorXd alpha_xi;   // T
  Eigen::VectorXd kappa_xi;   // T

  bool valid() const;
};

struct ChainState {
  Eigen::VectorXd beta;                // p
  std::vector<Eigen::VectorXd> eta;    // T vectors of length r
  std::vector<Eigen::VectorXd> xi;     // T vectors over active components
  ShapeState shapes;
};

class MnStmModel {
 public:
  MnStmModel(CountPanel panel, BasisSystem basis, MnStmSpec spec);

  int K() const { return panel_.K; }
  int N() const { return panel_.N; }
  int T() const { return panel_.T; }
  int p() const { return p_; }
  int rank() const { return basis_.rank; }
  int active_count(int t) const {
    return static_cast<int>(active_rows_[t].size());
  }

  const CountPanel& panel() const { return panel_; }
  const MnStmSpec& spec() const { return spec_; }
  const TimeBasis& basis(int t) const { return basis_.times[t]; }
  const std::vector<int>& active_rows(int t) const { return active_rows_[t]; }

  const Eigen::MatrixXd& x_obs(int t) const { return x_obs_[t]; }
  const Eigen::MatrixXd& phi_obs(int t) const { return phi_obs_[t]; }
  const Eigen::VectorXd& y_obs(int t) const { return y_obs_[t]; }
  const Eigen::VectorXd& trials_obs(int t) const { return trials_obs_[t]; }
  const Eigen::VectorXd& delta_obs(int t) const { return delta_obs_[t]; }
  const Eigen::VectorXd& eps_vec(int t) const { return eps_vec_[t]; }
  // Split shapes: likelihood block (paired with kappa = trials) and
  // replicated block (paired with kappa = delta).
  const Eigen::VectorXd& alpha_split1(int t) const { return alpha_split1_[t]; }
  const Eigen::VectorXd& alpha_split2(int t) const { return alpha_split2_[t]; }

  // -1 when the component carries no likelihood factor at t.
  int active_index(int k, int i, int t) const {
    return active_lookup_[t][pred_row(k, i, N())];
  }
  bool is_active(int k, int i, int t) const {
    return active_index(k, i, t) >= 0;
  }

  ChainState initial_state() const;

  // Linear predictor over the active components of time t.
  Eigen::VectorXd nu_obs(const ChainState& state, int t) const;
  double nu_cell(const ChainState& state, int k, int i, int t) const;
  double latent_to_probability(const ChainState& state, int k, int i,
                               int t) const;

  double data_loglik(const ChainState& state) const;
  // Data model plus every prior level, exact up to state-independent
  // constants; -inf when a shape truncation is violated.
  double log_joint(const ChainState& state) const;

 private:
  CountPanel panel_;
  BasisSystem basis_;
  MnStmSpec spec_;
  int p_ = 0;

  std::vector<std::vector<int>> active_rows_;
  std::vector<std::vector<int>> active_lookup_;
  std::vector<Eigen::MatrixXd> x_obs_;
  std::vector<Eigen::MatrixXd> phi_obs_;
  std::vector<Eigen::VectorXd> y_obs_;
  std::vector<Eigen::VectorXd> trials_obs_;
  std::vector<Eigen::VectorXd> delta_obs_;
  std::vector<Eigen::VectorXd> eps_vec_;
  std::vector<Eigen::VectorXd> alpha_split1_;
  std::vector<Eigen::VectorXd> alpha_split2_;
};

// Validates panel/basis/spec consistency, precomputes the stacked blocks
// and checks that every derived shape pair satisfies kappa > alpha > 0.
MnStmModel assemble_mnstm(CountPanel panel, BasisSystem basis, MnStmSpec spec);

}  // namespace mnstm
