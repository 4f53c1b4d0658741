#include "mnstm/sampler.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

#include "mnstm/ars.hpp"
#include "mnstm/conditionals.hpp"
#include "mnstm/logit_beta.hpp"
#include "mnstm/rng.hpp"
#include "mnstm/special_functions.hpp"

namespace mnstm {

void ChainConfig::validate() const {
  if (iterations < 1 || thinning < 1 || n_chains < 1) {
    throw std::invalid_argument("ChainConfig: bad iteration counts");
  }
  if (resolved_burn_in() >= iterations) {
    throw std::invalid_argument("ChainConfig: burn-in must be below iterations");
  }
}

namespace {

using Qr = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>;

Qr factor_checked(const Eigen::MatrixXd& h, const std::string& label) {
  Qr qr(h);
  if (qr.rank() < h.cols()) {
    const auto diag = qr.matrixR().diagonal();
    const double cond = std::abs(diag[0]) /
                        std::max(std::abs(diag[h.cols() - 1]), 1e-300);
    throw std::runtime_error("sampler: rank loss in the " + label +
                             " block (condition estimate " +
                             std::to_string(cond) + ")");
  }
  return qr;
}

Eigen::VectorXd draw_with(const Qr& qr, const FullConditionalSpec& spec,
                          Rng& rng, const std::string& label, int iteration) {
  Eigen::VectorXd w(spec.stacked_len());
  for (int i = 0; i < w.size(); ++i) {
    LogitBetaParams lb{spec.alpha[i], spec.kappa[i]};
    w[i] = spec.mu[i] + logit_beta_draw(lb, rng);
  }
  Eigen::VectorXd draw = qr.solve(w);
  if (!draw.allFinite()) {
    std::string detail;
    for (int i = 0; i < w.size(); ++i) {
      if (!std::isfinite(w[i])) {
        detail = "; row " + std::to_string(i) + " with shapes (" +
                 std::to_string(spec.alpha[i]) + ", " +
                 std::to_string(spec.kappa[i]) + ")";
        break;
      }
    }
    throw std::runtime_error("sampler diverged at iteration " +
                             std::to_string(iteration) + " in the " + label +
                             " block" + detail);
  }
  return draw;
}

struct ShapeKernelSums {
  double linear = 0.0;
  double softplus_sum = 0.0;
  int count = 0;
};

ShapeKernelSums eta_sums(const MnStmModel& model, const ChainState& state,
                         int t) {
  ShapeKernelSums sums;
  const int r = model.rank();
  const Eigen::VectorXd drift =
      (t == 0) ? Eigen::VectorXd::Zero(r).eval()
               : (model.basis(t).propagator * state.eta[t - 1]).eval();
  const Eigen::VectorXd z =
      model.basis(t).precision_factor * (state.eta[t] - drift);
  for (int j = 0; j < z.size(); ++j) {
    sums.linear += z[j];
    sums.softplus_sum += log1p_exp(z[j]);
  }
  sums.count = r;
  return sums;
}

ShapeKernelSums beta_sums(const ChainState& state) {
  ShapeKernelSums sums;
  for (int j = 0; j < state.beta.size(); ++j) {
    sums.linear += state.beta[j];
    sums.softplus_sum += log1p_exp(state.beta[j]);
  }
  sums.count = static_cast<int>(state.beta.size());
  return sums;
}

ShapeKernelSums xi_sums(const ChainState& state, int t) {
  ShapeKernelSums sums;
  const Eigen::VectorXd& xi = state.xi[t];
  for (int a = 0; a < xi.size(); ++a) {
    sums.linear += xi[a];
    sums.softplus_sum += log1p_exp(xi[a]);
  }
  sums.count = static_cast<int>(xi.size());
  return sums;
}

// Both kernels keep the gamma prior with the truncation entering as the
// support restriction.
ShapeKernel alpha_kernel(const ShapeKernelSums& sums, double kappa, double a1,
                         double tau1, const std::string& label) {
  const double count = sums.count;
  const double linear = sums.linear;
  ShapeKernel kernel;
  kernel.label = label;
  kernel.lower = 0.0;
  kernel.upper = kappa;
  kernel.log_density = [count, linear, kappa, a1, tau1](double alpha) {
    return -count * (std::lgamma(alpha) + std::lgamma(kappa - alpha)) +
           alpha * linear + (a1 - 1.0) * std::log(alpha) - tau1 * alpha;
  };
  return kernel;
}

ShapeKernel kappa_kernel(const ShapeKernelSums& sums, double alpha, double a,
                         double tau, const std::string& label) {
  const double count = sums.count;
  const double sp = sums.softplus_sum;
  ShapeKernel kernel;
  kernel.label = label;
  kernel.lower = alpha;
  kernel.upper = std::numeric_limits<double>::infinity();
  kernel.log_density = [count, sp, alpha, a, tau](double kappa) {
    return count * (std::lgamma(kappa) - std::lgamma(kappa - alpha)) -
           kappa * sp + (a - 1.0) * std::log(kappa) - tau * kappa;
  };
  return kernel;
}

double draw_shape(const ShapeKernel& kernel, Rng& rng) {
  return sample_log_concave(kernel.log_density, kernel.lower, kernel.upper,
                            rng, kernel.label);
}

}  // namespace

std::vector<ShapeKernel> shape_kernels(const MnStmModel& model,
                                       const ChainState& state) {
  const MnStmSpec& spec = model.spec();
  std::vector<ShapeKernel> kernels;
  if (model.p() > 0) {
    const ShapeKernelSums sums = beta_sums(state);
    kernels.push_back(alpha_kernel(sums, state.shapes.kappa_beta, spec.a_beta1,
                                   spec.tau_beta1, "alpha_beta"));
    kernels.push_back(kappa_kernel(sums, state.shapes.alpha_beta, spec.a_beta,
                                   spec.tau_beta, "kappa_beta"));
  }
  for (int t = 0; t < model.T(); ++t) {
    if (model.rank() > 0) {
      const ShapeKernelSums sums = eta_sums(model, state, t);
      kernels.push_back(alpha_kernel(sums, state.shapes.kappa_eta[t],
                                     spec.a_eta1, spec.tau_eta1,
                                     "alpha_eta[" + std::to_string(t) + "]"));
      kernels.push_back(kappa_kernel(sums, state.shapes.alpha_eta[t],
                                     spec.a_eta, spec.tau_eta,
                                     "kappa_eta[" + std::to_string(t) + "]"));
    }
    if (model.active_count(t) > 0) {
      const ShapeKernelSums sums = xi_sums(state, t);
      kernels.push_back(alpha_kernel(sums, state.shapes.kappa_xi[t], spec.a_xi1,
                                     spec.tau_xi1,
                                     "alpha_xi[" + std::to_string(t) + "]"));
      kernels.push_back(kappa_kernel(sums, state.shapes.alpha_xi[t], spec.a_xi,
                                     spec.tau_xi,
                                     "kappa_xi[" + std::to_string(t) + "]"));
    }
  }
  return kernels;
}

Chain run_mnstm(const MnStmModel& model, const ChainConfig& config) {
  config.validate();
  const MnStmSpec& spec = model.spec();
  const int t_count = model.T();
  Rng rng(config.seed);
  ChainState state = model.initial_state();

  // The H stacks are state independent; factor them once.
  std::unique_ptr<Qr> beta_qr;
  if (model.p() > 0) {
    beta_qr = std::make_unique<Qr>(
        factor_checked(build_beta_conditional(model, state).h, "beta"));
  }
  std::vector<std::unique_ptr<Qr>> eta_qr(t_count);
  std::vector<std::unique_ptr<Qr>> xi_qr(t_count);
  for (int t = 0; t < t_count; ++t) {
    if (model.rank() > 0) {
      eta_qr[t] = std::make_unique<Qr>(
          factor_checked(build_eta_conditional(model, state, t).h,
                         "eta[" + std::to_string(t) + "]"));
    }
    if (model.active_count(t) > 0) {
      xi_qr[t] = std::make_unique<Qr>(factor_checked(
          build_xi_conditional(model, state, t).h,
          "xi[" + std::to_string(t) + "]"));
    }
  }

  Chain chain;
  const int burn_in = config.resolved_burn_in();
  for (int it = 0; it < config.iterations; ++it) {
    if (model.p() > 0) {
      state.beta = draw_with(*beta_qr, build_beta_conditional(model, state),
                             rng, "beta", it);
    }
    if (model.rank() > 0) {
      for (int t = 0; t < t_count; ++t) {
        state.eta[t] = draw_with(
            *eta_qr[t], build_eta_conditional(model, state, t), rng,
            "eta[" + std::to_string(t) + "]", it);
      }
    }
    for (int t = 0; t < t_count; ++t) {
      if (model.active_count(t) > 0) {
        state.xi[t] = draw_with(
            *xi_qr[t], build_xi_conditional(model, state, t), rng,
            "xi[" + std::to_string(t) + "]", it);
      }
    }
    if (!spec.fixed_shapes) {
      if (model.p() > 0) {
        const ShapeKernelSums sums = beta_sums(state);
        state.shapes.alpha_beta = draw_shape(
            alpha_kernel(sums, state.shapes.kappa_beta, spec.a_beta1,
                         spec.tau_beta1, "alpha_beta"),
            rng);
        state.shapes.kappa_beta = draw_shape(
            kappa_kernel(sums, state.shapes.alpha_beta, spec.a_beta,
                         spec.tau_beta, "kappa_beta"),
            rng);
      }
      for (int t = 0; t < t_count; ++t) {
        if (model.rank() > 0) {
          const ShapeKernelSums sums = eta_sums(model, state, t);
          state.shapes.alpha_eta[t] = draw_shape(
              alpha_kernel(sums, state.shapes.kappa_eta[t], spec.a_eta1,
                           spec.tau_eta1, "alpha_eta[" + std::to_string(t) + "]"),
              rng);
          state.shapes.kappa_eta[t] = draw_shape(
              kappa_kernel(sums, state.shapes.alpha_eta[t], spec.a_eta,
                           spec.tau_eta, "kappa_eta[" + std::to_string(t) + "]"),
              rng);
        }
        if (model.active_count(t) > 0) {
          const ShapeKernelSums sums = xi_sums(state, t);
          state.shapes.alpha_xi[t] = draw_shape(
              alpha_kernel(sums, state.shapes.kappa_xi[t], spec.a_xi1,
                           spec.tau_xi1, "alpha_xi[" + std::to_string(t) + "]"),
              rng);
          state.shapes.kappa_xi[t] = draw_shape(
              kappa_kernel(sums, state.shapes.alpha_xi[t], spec.a_xi,
                           spec.tau_xi, "kappa_xi[" + std::to_string(t) + "]"),
              rng);
        }
      }
    }
    // The precision factor depends only on the basis and the target
    // precision; the shape draws move only its variance scale, which is
    // not consumed by the draws above. Nothing to refresh numerically.

    const double lj = model.log_joint(state);
    if (!std::isfinite(lj)) {
      throw std::runtime_error("sampler diverged at iteration " +
                               std::to_string(it));
    }
    if (it >= burn_in && (it - burn_in) % config.thinning == 0) {
      chain.states.push_back(state);
      chain.log_joint_trace.push_back(lj);
      chain.iteration_index.push_back(it);
    }
  }
  return chain;
}

Chain run_lmlb(const MnStmModel& model, const ChainConfig& config) {
  if (model.T() != 1) {
    throw std::invalid_argument("run_lmlb: the static sampler requires T = 1");
  }
  return run_mnstm(model, config);
}

std::vector<Chain> run_chains(const MnStmModel& model,
                              const ChainConfig& config) {
  std::vector<Chain> chains;
  for (int c = 0; c < config.n_chains; ++c) {
    ChainConfig one = config;
    one.seed = config.seed + static_cast<std::uint64_t>(c);
    one.n_chains = 1;
    chains.push_back(run_mnstm(model, one));
  }
  return chains;
}

std::vector<double> ProportionReplicates::cell_series(int k, int i,
                                                      int t) const {
  std::vector<double> out(B);
  for (int b = 0; b < B; ++b) out[b] = at(b, k, i, t);
  return out;
}

ProportionReplicates posterior_proportions(const Chain& chain,
                                           const MnStmModel& model,
                                           std::uint64_t seed) {
  if (chain.states.empty()) {
    throw std::invalid_argument("posterior_proportions: empty chain");
  }
  const int K = model.K();
  const int N = model.N();
  const int T = model.T();
  const int B = static_cast<int>(chain.states.size());
  ProportionReplicates rep;
  rep.K = K;
  rep.N = N;
  rep.T = T;
  rep.B = B;
  rep.values.assign(static_cast<std::size_t>(B) * K * N * T, 0.0);

  Rng rng(seed);
  for (int b = 0; b < B; ++b) {
    const ChainState& state = chain.states[b];
    for (int t = 0; t < T; ++t) {
      const Eigen::VectorXd base =
          model.basis(t).x_pred * state.beta +
          model.basis(t).phi_pred * state.eta[t];
      for (int i = 0; i < N; ++i) {
        double remaining = 1.0;
        for (int k = 0; k < K - 1; ++k) {
          double nu = base[pred_row(k, i, N)];
          const int a = model.active_index(k, i, t);
          if (a >= 0) {
            nu += state.xi[t][a];
          } else {
            LogitBetaParams lb{state.shapes.alpha_xi[t],
                               state.shapes.kappa_xi[t]};
            nu += logit_beta_draw(lb, rng);
          }
          const double pi_k = remaining * sigmoid(nu);
          rep.values[static_cast<std::size_t>(((b * K + k) * N + i)) * T + t] =
              pi_k;
          remaining -= pi_k;
        }
        rep.values[static_cast<std::size_t>(((b * K + (K - 1)) * N + i)) * T +
                   t] = remaining;
      }
    }
  }
  return rep;
}

}  // namespace mnstm
