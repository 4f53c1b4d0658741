#include "mnstm/conditionals.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mnstm/logit_beta.hpp"
#include "mnstm/mlb.hpp"

namespace mnstm {

void FullConditionalSpec::validate() const {
  const int m = stacked_len();
  if (mu.size() != m || alpha.size() != m || kappa.size() != m) {
    throw std::invalid_argument("FullConditionalSpec: dimension mismatch");
  }
  for (int i = 0; i < m; ++i) {
    if (!(alpha[i] > 0.0) || !(kappa[i] > alpha[i])) {
      throw std::invalid_argument(
          "FullConditionalSpec: invalid shape pair at row " + std::to_string(i));
    }
  }
}

double FullConditionalSpec::logkernel(const Eigen::VectorXd& q) const {
  return conditional_mlb_logkernel(q, mu, h, alpha, kappa);
}

FullConditionalSpec build_beta_conditional(const MnStmModel& model,
                                           const ChainState& state) {
  const int p = model.p();
  if (p == 0) {
    throw std::invalid_argument("build_beta_conditional: model has no covariates");
  }
  const double sigma = model.spec().sigma;
  const bool reg = model.spec().regularized;
  int l_total = 0;
  for (int t = 0; t < model.T(); ++t) l_total += model.active_count(t);

  const int m = (reg ? 2 * l_total : l_total) + p;
  FullConditionalSpec spec;
  spec.h.setZero(m, p);
  spec.mu.setZero(m);
  spec.alpha.setZero(m);
  spec.kappa.setZero(m);

  int row = 0;
  for (int t = 0; t < model.T(); ++t) {
    const int l_t = model.active_count(t);
    spec.h.block(row, 0, l_t, p) = model.x_obs(t);
    spec.mu.segment(row, l_t) = -(model.phi_obs(t) * state.eta[t] + state.xi[t]);
    spec.alpha.segment(row, l_t) =
        reg ? model.alpha_split1(t) : model.y_obs(t);
    spec.kappa.segment(row, l_t) = model.trials_obs(t);
    row += l_t;
  }
  if (reg) {
    for (int t = 0; t < model.T(); ++t) {
      const int l_t = model.active_count(t);
      spec.h.block(row, 0, l_t, p) = sigma * model.x_obs(t);
      spec.alpha.segment(row, l_t) = model.alpha_split2(t);
      spec.kappa.segment(row, l_t) = model.delta_obs(t);
      row += l_t;
    }
  }
  spec.h.block(row, 0, p, p) = Eigen::MatrixXd::Identity(p, p);
  spec.alpha.segment(row, p).setConstant(state.shapes.alpha_beta);
  spec.kappa.segment(row, p).setConstant(state.shapes.kappa_beta);
  spec.validate();
  return spec;
}

FullConditionalSpec build_eta_conditional(const MnStmModel& model,
                                          const ChainState& state, int t) {
  const int r = model.rank();
  if (r == 0) {
    throw std::invalid_argument("build_eta_conditional: model has no basis");
  }
  if (t < 0 || t >= model.T()) {
    throw std::invalid_argument("build_eta_conditional: t out of range");
  }
  const double sigma = model.spec().sigma;
  const bool reg = model.spec().regularized;
  const int l_t = model.active_count(t);
  const bool has_next = t + 1 < model.T();
  const int l_next = has_next ? model.active_count(t + 1) : 0;

  int m = l_t + r;
  if (reg) m += l_t;
  if (has_next) m += r + (reg ? l_next : 0);

  FullConditionalSpec spec;
  spec.h.setZero(m, r);
  spec.mu.setZero(m);
  spec.alpha.setZero(m);
  spec.kappa.setZero(m);

  const Eigen::VectorXd drift =
      (t == 0) ? Eigen::VectorXd::Zero(r).eval()
               : (model.basis(t).propagator * state.eta[t - 1]).eval();

  int row = 0;
  // likelihood rows
  spec.h.block(row, 0, l_t, r) = model.phi_obs(t);
  spec.mu.segment(row, l_t) = -(model.x_obs(t) * state.beta + state.xi[t]);
  spec.alpha.segment(row, l_t) = reg ? model.alpha_split1(t) : model.y_obs(t);
  spec.kappa.segment(row, l_t) = model.trials_obs(t);
  row += l_t;
  // replicated prior rows
  if (reg) {
    spec.h.block(row, 0, l_t, r) = sigma * model.phi_obs(t);
    spec.mu.segment(row, l_t) = sigma * (model.phi_obs(t) * drift);
    spec.alpha.segment(row, l_t) = model.alpha_split2(t);
    spec.kappa.segment(row, l_t) = model.delta_obs(t);
    row += l_t;
  }
  // precision-factor prior rows
  spec.h.block(row, 0, r, r) = model.basis(t).precision_factor;
  spec.mu.segment(row, r) = model.basis(t).precision_factor * drift;
  spec.alpha.segment(row, r).setConstant(state.shapes.alpha_eta[t]);
  spec.kappa.segment(row, r).setConstant(state.shapes.kappa_eta[t]);
  row += r;
  // feedback blocks from the t+1 transition
  if (has_next) {
    const Eigen::MatrixXd& m_next = model.basis(t + 1).propagator;
    const Eigen::MatrixXd& v_next = model.basis(t + 1).precision_factor;
    if (reg) {
      spec.h.block(row, 0, l_next, r) = -sigma * (model.phi_obs(t + 1) * m_next);
      spec.mu.segment(row, l_next) =
          -sigma * (model.phi_obs(t + 1) * state.eta[t + 1]);
      spec.alpha.segment(row, l_next) = model.eps_vec(t + 1) / sigma;
      spec.kappa.segment(row, l_next) = model.delta_obs(t + 1);
      row += l_next;
    }
    spec.h.block(row, 0, r, r) = -(v_next * m_next);
    spec.mu.segment(row, r) = -(v_next * state.eta[t + 1]);
    spec.alpha.segment(row, r).setConstant(state.shapes.alpha_eta[t + 1]);
    spec.kappa.segment(row, r).setConstant(state.shapes.kappa_eta[t + 1]);
    row += r;
  }
  spec.validate();
  return spec;
}

FullConditionalSpec build_xi_conditional(const MnStmModel& model,
                                         const ChainState& state, int t) {
  if (t < 0 || t >= model.T()) {
    throw std::invalid_argument("build_xi_conditional: t out of range");
  }
  const double sigma = model.spec().sigma;
  const bool reg = model.spec().regularized;
  const int l_t = model.active_count(t);
  const double a_xi = state.shapes.alpha_xi[t];
  const double k_xi = state.shapes.kappa_xi[t];
  const Eigen::VectorXd lik_mu =
      -(model.x_obs(t) * state.beta + model.phi_obs(t) * state.eta[t]);
  // When the model has no mean structure every block shares the H entry
  // and a structurally zero location, so the stack consolidates to a
  // square system by summing shapes; the kernel is unchanged and the draw
  // becomes exact. Models with mean structure keep the full stack.
  const bool lik_mu_zero = model.p() == 0 && model.rank() == 0;
  const bool merge_all = lik_mu_zero && sigma == 1.0;
  const bool merge_reg_prior = merge_all && reg;

  const int blocks = merge_all ? 1 : (reg && !merge_reg_prior ? 3 : 2);
  FullConditionalSpec spec;
  spec.h.setZero(blocks * l_t, l_t);
  spec.mu.setZero(blocks * l_t);
  spec.alpha.setZero(blocks * l_t);
  spec.kappa.setZero(blocks * l_t);

  for (int a = 0; a < l_t; ++a) {
    const double lik_alpha = reg ? model.alpha_split1(t)[a] : model.y_obs(t)[a];
    const double lik_kappa = model.trials_obs(t)[a];
    if (merge_all) {
      spec.h(a, a) = 1.0;
      spec.alpha[a] = lik_alpha + a_xi + (reg ? model.alpha_split2(t)[a] : 0.0);
      spec.kappa[a] = lik_kappa + k_xi + (reg ? model.delta_obs(t)[a] : 0.0);
      continue;
    }
    spec.h(a, a) = 1.0;
    spec.mu[a] = lik_mu[a];
    spec.alpha[a] = lik_alpha;
    spec.kappa[a] = lik_kappa;
    if (!reg) {
      spec.h(l_t + a, a) = 1.0;
      spec.alpha[l_t + a] = a_xi;
      spec.kappa[l_t + a] = k_xi;
    } else if (merge_reg_prior) {
      spec.h(l_t + a, a) = 1.0;
      spec.alpha[l_t + a] = model.alpha_split2(t)[a] + a_xi;
      spec.kappa[l_t + a] = model.delta_obs(t)[a] + k_xi;
    } else {
      spec.h(l_t + a, a) = sigma;
      spec.alpha[l_t + a] = model.alpha_split2(t)[a];
      spec.kappa[l_t + a] = model.delta_obs(t)[a];
      spec.h(2 * l_t + a, a) = 1.0;
      spec.alpha[2 * l_t + a] = a_xi;
      spec.kappa[2 * l_t + a] = k_xi;
    }
  }
  spec.validate();
  return spec;
}

Eigen::VectorXd draw_from_conditional(const FullConditionalSpec& spec,
                                      Rng& rng) {
  spec.validate();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(spec.h);
  if (qr.rank() < spec.target_len()) {
    const auto diag = qr.matrixR().diagonal();
    const double cond =
        std::abs(diag[0]) /
        std::max(std::abs(diag[spec.target_len() - 1]), 1e-300);
    throw std::runtime_error(
        "draw_from_conditional: numerical rank loss (condition estimate " +
        std::to_string(cond) + ")");
  }
  Eigen::VectorXd w(spec.stacked_len());
  for (int i = 0; i < w.size(); ++i) {
    LogitBetaParams lb{spec.alpha[i], spec.kappa[i]};
    w[i] = spec.mu[i] + logit_beta_draw(lb, rng);
  }
  return qr.solve(w);
}

}  // namespace mnstm
