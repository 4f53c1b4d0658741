#include "mnstm/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mnstm/special_functions.hpp"

namespace mnstm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double gamma_logpdf(double x, double shape, double rate) {
  if (!(x > 0.0)) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) +
         (shape - 1.0) * std::log(x) - rate * x;
}

// Shape-dependent part of the logit-beta normalizing constant.
double lb_log_const(double alpha, double kappa) {
  return -log_beta(alpha, kappa - alpha);
}

}  // namespace

std::vector<int> active_pred_rows(const CountPanel& panel, int t) {
  std::vector<int> rows;
  for (int k = 0; k < panel.K - 1; ++k) {
    for (int i = 0; i < panel.N; ++i) {
      if (panel.is_observed(i, t) && panel.stick_trials(k, i, t) >= 1) {
        rows.push_back(pred_row(k, i, panel.N));
      }
    }
  }
  return rows;
}

void BasisSystem::validate() const {
  if (times.empty()) {
    throw std::invalid_argument("BasisSystem: no time slices");
  }
  for (const auto& tb : times) {
    if (tb.phi_pred.cols() != rank) {
      throw std::invalid_argument("BasisSystem: rank mismatch");
    }
    if (tb.phi_pred.rows() != tb.x_pred.rows()) {
      throw std::invalid_argument("BasisSystem: row mismatch");
    }
    if (rank > 0) {
      const double orth_err =
          (tb.phi_pred.transpose() * tb.phi_pred -
           Eigen::MatrixXd::Identity(rank, rank))
              .cwiseAbs()
              .maxCoeff();
      if (orth_err > 1e-10) {
        throw std::invalid_argument("BasisSystem: basis not orthonormal");
      }
      if (tb.x_pred.cols() > 0) {
        const double confound =
            (tb.phi_pred.transpose() * tb.x_pred).cwiseAbs().maxCoeff();
        if (confound > 1e-8) {
          throw std::invalid_argument(
              "BasisSystem: basis not orthogonal to the covariates");
        }
      }
      if (tb.propagator.rows() != rank || tb.propagator.cols() != rank ||
          tb.precision_factor.rows() != rank ||
          tb.precision_factor.cols() != rank) {
        throw std::invalid_argument("BasisSystem: bad propagator/precision dims");
      }
    }
  }
}

BasisSystem build_basis_system(const CountPanel& panel,
                               const Adjacency& unit_adj,
                               const std::vector<Eigen::MatrixXd>& x_pred,
                               int r, double alpha0, double kappa0,
                               const Eigen::MatrixXd* p_target,
                               std::vector<std::string>* warnings) {
  panel.validate();
  unit_adj.validate();
  if (unit_adj.n_nodes() != panel.N) {
    throw std::invalid_argument("build_basis_system: adjacency size mismatch");
  }
  if (static_cast<int>(x_pred.size()) != panel.T) {
    throw std::invalid_argument("build_basis_system: need one X per time");
  }
  const Adjacency expanded = unit_adj.expand_blocks(panel.K - 1);
  const int rows = expanded.n_nodes();
  Eigen::MatrixXd target;
  if (p_target != nullptr) {
    target = *p_target;
  } else {
    target = Eigen::MatrixXd::Identity(rows, rows) - expanded.edges;
  }

  BasisSystem basis;
  basis.rank = r;
  basis.times.resize(panel.T);
  const Eigen::MatrixXd u_weight = Eigen::MatrixXd::Identity(r, r);
  for (int t = 0; t < panel.T; ++t) {
    TimeBasis& tb = basis.times[t];
    tb.x_pred = x_pred[t];
    if (tb.x_pred.rows() != rows) {
      throw std::invalid_argument("build_basis_system: X row mismatch");
    }
    const Eigen::MatrixXd x_orth = orth_basis(tb.x_pred);
    tb.phi_pred = mi_basis(x_orth, expanded, r, warnings);
    tb.propagator = (t == 0)
                        ? Eigen::MatrixXd::Identity(r, r)
                        : mi_propagator(tb.phi_pred, tb.x_pred, u_weight,
                                        warnings);
    const std::vector<int> active = active_pred_rows(panel, t);
    Eigen::MatrixXd phi_obs(active.size(), r);
    for (std::size_t a = 0; a < active.size(); ++a) {
      phi_obs.row(a) = tb.phi_pred.row(active[a]);
    }
    const PrecisionSolve solve =
        solve_precision_factor(tb.phi_pred, phi_obs, target, alpha0, kappa0);
    tb.precision_factor = solve.v;
    tb.sigma_eta_sq = solve.sigma_eta_sq;
  }
  basis.validate();
  return basis;
}

BasisSystem make_direct_basis(const Eigen::MatrixXd& x_pred,
                              const Eigen::MatrixXd& phi_pred) {
  BasisSystem basis;
  basis.rank = static_cast<int>(phi_pred.cols());
  basis.times.resize(1);
  TimeBasis& tb = basis.times[0];
  tb.x_pred = x_pred;
  tb.phi_pred = phi_pred;
  tb.propagator = Eigen::MatrixXd::Identity(basis.rank, basis.rank);
  tb.precision_factor = Eigen::MatrixXd::Identity(basis.rank, basis.rank);
  tb.sigma_eta_sq = trigamma(1.0) + trigamma(1.0);
  basis.validate();
  return basis;
}

void MnStmSpec::validate() const {
  if (!(sigma > 0.0)) throw std::invalid_argument("MnStmSpec: sigma must be > 0");
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("MnStmSpec: rho must lie in (0,1)");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("MnStmSpec: epsilon must be > 0");
  }
  const double hyper[] = {a_beta, tau_beta, a_beta1, tau_beta1, a_eta,
                          tau_eta, a_eta1,  tau_eta1, a_xi,    tau_xi,
                          a_xi1,  tau_xi1};
  for (const double h : hyper) {
    if (!(h > 0.0)) {
      throw std::invalid_argument("MnStmSpec: gamma hyperparameters must be > 0");
    }
  }
  if (!(init_alpha > 0.0) || !(init_kappa > init_alpha)) {
    throw std::invalid_argument("MnStmSpec: require init_kappa > init_alpha > 0");
  }
}

bool ShapeState::valid() const {
  auto ok = [](double a, double k) { return a > 0.0 && k > a; };
  if (!ok(alpha_beta, kappa_beta)) return false;
  for (int t = 0; t < alpha_eta.size(); ++t) {
    if (!ok(alpha_eta[t], kappa_eta[t])) return false;
  }
  for (int t = 0; t < alpha_xi.size(); ++t) {
    if (!ok(alpha_xi[t], kappa_xi[t])) return false;
  }
  return true;
}

MnStmModel::MnStmModel(CountPanel panel, BasisSystem basis, MnStmSpec spec)
    : panel_(std::move(panel)), basis_(std::move(basis)), spec_(std::move(spec)) {
  panel_.validate();
  spec_.validate();
  basis_.validate();
  if (static_cast<int>(basis_.times.size()) != panel_.T) {
    throw std::invalid_argument("MnStmModel: basis/panel time mismatch");
  }
  const int block_rows = (panel_.K - 1) * panel_.N;
  p_ = static_cast<int>(basis_.times[0].x_pred.cols());
  for (const auto& tb : basis_.times) {
    if (tb.x_pred.rows() != block_rows || tb.x_pred.cols() != p_) {
      throw std::invalid_argument("MnStmModel: covariate block mismatch");
    }
  }

  const int t_count = panel_.T;
  active_rows_.resize(t_count);
  active_lookup_.assign(t_count, std::vector<int>(block_rows, -1));
  x_obs_.resize(t_count);
  phi_obs_.resize(t_count);
  y_obs_.resize(t_count);
  trials_obs_.resize(t_count);
  delta_obs_.resize(t_count);
  eps_vec_.resize(t_count);
  alpha_split1_.resize(t_count);
  alpha_split2_.resize(t_count);

  const double sigma = spec_.sigma;
  const double rho = spec_.rho;
  const double eps = spec_.epsilon;
  for (int t = 0; t < t_count; ++t) {
    active_rows_[t] = active_pred_rows(panel_, t);
    const int l_t = static_cast<int>(active_rows_[t].size());
    x_obs_[t].resize(l_t, p_);
    phi_obs_[t].resize(l_t, basis_.rank);
    y_obs_[t].resize(l_t);
    trials_obs_[t].resize(l_t);
    for (int a = 0; a < l_t; ++a) {
      const int row = active_rows_[t][a];
      const int k = row / panel_.N;
      const int i = row % panel_.N;
      active_lookup_[t][row] = a;
      x_obs_[t].row(a) = basis_.times[t].x_pred.row(row);
      phi_obs_[t].row(a) = basis_.times[t].phi_pred.row(row);
      y_obs_[t][a] = static_cast<double>(panel_.y(k, i, t));
      trials_obs_[t][a] = static_cast<double>(panel_.stick_trials(k, i, t));
    }
    delta_obs_[t] = spec_.delta_constant > 0.0
                        ? Eigen::VectorXd::Constant(l_t, spec_.delta_constant)
                        : trials_obs_[t];
    const Eigen::VectorXd& y = y_obs_[t];
    if (spec_.epsilon_mode == EpsilonMode::kHalfSplit) {
      eps_vec_[t] = Eigen::VectorXd::Constant(l_t, eps);
      alpha_split1_[t] = rho * y.array() + 0.5 * eps;
      alpha_split2_[t] = ((1.0 - rho) * y.array() + 0.5 * eps) / sigma;
    } else {
      // Count-matched split: both blocks concentrate near the same scaled
      // observation, the prior tilt absorbing the difference.
      eps_vec_[t] = sigma * rho * y.array() - (1.0 - rho) * y.array() / sigma +
                    eps * (1.0 + sigma);
      alpha_split1_[t] = rho * y.array() + eps;
      alpha_split2_[t] = (1.0 - rho) * y.array() / sigma +
                         rho * y.array() - (1.0 - rho) * y.array() / (sigma * sigma) +
                         eps;
    }
    if (spec_.regularized) {
      for (int a = 0; a < l_t; ++a) {
        const bool ok =
            alpha_split1_[t][a] > 0.0 && trials_obs_[t][a] > alpha_split1_[t][a] &&
            alpha_split2_[t][a] > 0.0 && delta_obs_[t][a] > alpha_split2_[t][a] &&
            eps_vec_[t][a] > 0.0 && delta_obs_[t][a] > eps_vec_[t][a] / sigma;
        if (!ok) {
          throw std::invalid_argument(
              "MnStmModel: split shapes invalid at time " + std::to_string(t) +
              ", component " + std::to_string(a) +
              " (check rho/epsilon/delta against the counts)");
        }
      }
    }
  }
}

MnStmModel assemble_mnstm(CountPanel panel, BasisSystem basis, MnStmSpec spec) {
  return MnStmModel(std::move(panel), std::move(basis), std::move(spec));
}

ChainState MnStmModel::initial_state() const {
  ChainState state;
  state.beta = Eigen::VectorXd::Zero(p_);
  state.eta.resize(T());
  state.xi.resize(T());
  for (int t = 0; t < T(); ++t) {
    state.eta[t] = Eigen::VectorXd::Zero(rank());
    state.xi[t] = Eigen::VectorXd::Zero(active_count(t));
  }
  state.shapes.alpha_beta = spec_.init_alpha;
  state.shapes.kappa_beta = spec_.init_kappa;
  state.shapes.alpha_eta = Eigen::VectorXd::Constant(T(), spec_.init_alpha);
  state.shapes.kappa_eta = Eigen::VectorXd::Constant(T(), spec_.init_kappa);
  state.shapes.alpha_xi = Eigen::VectorXd::Constant(T(), spec_.init_alpha);
  state.shapes.kappa_xi = Eigen::VectorXd::Constant(T(), spec_.init_kappa);
  return state;
}

Eigen::VectorXd MnStmModel::nu_obs(const ChainState& state, int t) const {
  Eigen::VectorXd nu = x_obs_[t] * state.beta + phi_obs_[t] * state.eta[t];
  nu += state.xi[t];
  return nu;
}

double MnStmModel::nu_cell(const ChainState& state, int k, int i, int t) const {
  const int row = pred_row(k, i, N());
  double nu = basis_.times[t].x_pred.row(row).dot(state.beta) +
              basis_.times[t].phi_pred.row(row).dot(state.eta[t]);
  const int a = active_index(k, i, t);
  if (a >= 0) nu += state.xi[t][a];
  return nu;
}

double MnStmModel::latent_to_probability(const ChainState& state, int k, int i,
                                         int t) const {
  return sigmoid(nu_cell(state, k, i, t));
}

double MnStmModel::data_loglik(const ChainState& state) const {
  double out = 0.0;
  for (int t = 0; t < T(); ++t) {
    const Eigen::VectorXd nu = nu_obs(state, t);
    const Eigen::VectorXd& y = y_obs_[t];
    const Eigen::VectorXd& n = trials_obs_[t];
    for (int a = 0; a < nu.size(); ++a) {
      out += log_choose(n[a], y[a]) + y[a] * nu[a] - n[a] * log1p_exp(nu[a]);
    }
  }
  return out;
}

double MnStmModel::log_joint(const ChainState& state) const {
  if (!state.shapes.valid()) return kNegInf;
  const double sigma = spec_.sigma;
  double out = data_loglik(state);

  // beta prior
  if (p_ > 0) {
    if (spec_.regularized) {
      for (int t = 0; t < T(); ++t) {
        const Eigen::VectorXd z = sigma * (x_obs_[t] * state.beta);
        for (int a = 0; a < z.size(); ++a) {
          out += (eps_vec_[t][a] / sigma) * z[a] -
                 delta_obs_[t][a] * log1p_exp(z[a]);
        }
      }
    }
    const double ab = state.shapes.alpha_beta;
    const double kb = state.shapes.kappa_beta;
    for (int j = 0; j < p_; ++j) {
      out += ab * state.beta[j] - kb * log1p_exp(state.beta[j]);
    }
    out += p_ * lb_log_const(ab, kb);
    out += gamma_logpdf(ab, spec_.a_beta1, spec_.tau_beta1);
    out += gamma_logpdf(kb, spec_.a_beta, spec_.tau_beta);
  }

  // eta priors
  if (rank() > 0) {
    for (int t = 0; t < T(); ++t) {
      const Eigen::VectorXd drift =
          (t == 0) ? Eigen::VectorXd::Zero(rank()).eval()
                   : (basis_.times[t].propagator * state.eta[t - 1]).eval();
      const Eigen::VectorXd centered = state.eta[t] - drift;
      if (spec_.regularized) {
        const Eigen::VectorXd za = sigma * (phi_obs_[t] * centered);
        for (int a = 0; a < za.size(); ++a) {
          out += (eps_vec_[t][a] / sigma) * za[a] -
                 delta_obs_[t][a] * log1p_exp(za[a]);
        }
      }
      const Eigen::VectorXd zb = basis_.times[t].precision_factor * centered;
      const double at = state.shapes.alpha_eta[t];
      const double kt = state.shapes.kappa_eta[t];
      for (int j = 0; j < zb.size(); ++j) {
        out += at * zb[j] - kt * log1p_exp(zb[j]);
      }
      out += rank() * lb_log_const(at, kt);
      out += gamma_logpdf(at, spec_.a_eta1, spec_.tau_eta1);
      out += gamma_logpdf(kt, spec_.a_eta, spec_.tau_eta);
    }
  }

  // xi priors
  for (int t = 0; t < T(); ++t) {
    const double axi = state.shapes.alpha_xi[t];
    const double kxi = state.shapes.kappa_xi[t];
    const Eigen::VectorXd& xi = state.xi[t];
    for (int a = 0; a < xi.size(); ++a) {
      if (spec_.regularized) {
        const double z = sigma * xi[a];
        out += (eps_vec_[t][a] / sigma) * z - delta_obs_[t][a] * log1p_exp(z);
      }
      out += axi * xi[a] - kxi * log1p_exp(xi[a]);
    }
    out += active_count(t) * lb_log_const(axi, kxi);
    out += gamma_logpdf(axi, spec_.a_xi1, spec_.tau_xi1);
    out += gamma_logpdf(kxi, spec_.a_xi, spec_.tau_xi);
  }
  return out;
}

}  // namespace mnstm
