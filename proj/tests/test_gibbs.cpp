#include <doctest.h>

#include <cmath>

#include "mnstm/diagnostics.hpp"
#include "mnstm/sampler.hpp"
#include "mnstm/simulate.hpp"
#include "mnstm/special_functions.hpp"
#include "test_util.hpp"

using namespace mnstm;

namespace {

MnStmModel desk_model(int t_points, unsigned seed, MnStmSpec spec = {}) {
  SimDesign design;
  design.variant = SimVariant::kEmpiricalMnstm;
  design.n_units = 8;
  design.k_categories = 3;
  design.t_points = t_points;
  design.rank = 3;
  design.cell_total = 40;
  const SimulatedData sim = simulate_panel(design, seed);
  const BasisSystem basis =
      build_basis_system(sim.panel, sim.unit_adj, sim.x_pred, design.rank);
  return assemble_mnstm(sim.panel, basis, spec);
}

}  // namespace

TEST_CASE("identical seeds reproduce the chain bitwise") {
  const MnStmModel model = desk_model(2, 71);
  ChainConfig config;
  config.iterations = 60;
  config.burn_in = 10;
  config.seed = 99;
  const Chain a = run_mnstm(model, config);
  const Chain b = run_mnstm(model, config);
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    CHECK((a.states[i].beta - b.states[i].beta).cwiseAbs().maxCoeff() == 0.0);
    for (int t = 0; t < model.T(); ++t) {
      CHECK((a.states[i].eta[t] - b.states[i].eta[t]).cwiseAbs().maxCoeff() ==
            0.0);
      CHECK((a.states[i].xi[t] - b.states[i].xi[t]).cwiseAbs().maxCoeff() ==
            0.0);
    }
    CHECK(a.log_joint_trace[i] == b.log_joint_trace[i]);
  }
}

TEST_CASE("joint density stays finite along the chain") {
  const MnStmModel model = desk_model(3, 72);
  ChainConfig config;
  config.iterations = 120;
  config.seed = 5;
  const Chain chain = run_mnstm(model, config);
  for (const double lj : chain.log_joint_trace) {
    CHECK(std::isfinite(lj));
  }
  // every truncated shape draw respects its support
  for (const auto& s : chain.states) {
    CHECK(s.shapes.alpha_beta > 0.0);
    CHECK(s.shapes.kappa_beta > s.shapes.alpha_beta);
    for (int t = 0; t < model.T(); ++t) {
      CHECK(s.shapes.alpha_eta[t] > 0.0);
      CHECK(s.shapes.kappa_eta[t] > s.shapes.alpha_eta[t]);
      CHECK(s.shapes.alpha_xi[t] > 0.0);
      CHECK(s.shapes.kappa_xi[t] > s.shapes.alpha_xi[t]);
    }
  }
}

TEST_CASE("static wrapper accepts only single-time models") {
  const MnStmModel multi = desk_model(2, 73);
  ChainConfig config;
  config.iterations = 10;
  CHECK_THROWS_AS(run_lmlb(multi, config), std::invalid_argument);
  const MnStmModel single = desk_model(1, 74);
  const Chain chain = run_lmlb(single, config);
  CHECK(chain.states.size() == 9);  // 10 iterations, 10% burn-in
}

TEST_CASE("a zero-information panel samples the prior") {
  // all observed cells carry zero counts: no likelihood rows anywhere
  CountPanel panel = CountPanel::zeros(2, 3, 1);
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(3, 1);
  Eigen::MatrixXd phi(3, 0);
  const BasisSystem basis = make_direct_basis(x, phi);
  const MnStmModel model = assemble_mnstm(panel, basis, MnStmSpec{});
  CHECK(model.active_count(0) == 0);

  ChainConfig config;
  config.iterations = 12000;
  config.burn_in = 2000;
  config.seed = 17;
  const Chain chain = run_mnstm(model, config);
  std::vector<double> alpha, kappa;
  for (const auto& s : chain.states) {
    alpha.push_back(s.shapes.alpha_beta);
    kappa.push_back(s.shapes.kappa_beta);
  }
  // with flat unit-rate hyperpriors the joint prior is e^{-a-k} on k > a:
  // E[alpha] = 1/2, E[kappa] = 3/2
  CHECK(testutil::sample_mean(alpha) == doctest::Approx(0.5).epsilon(0.08));
  CHECK(testutil::sample_mean(kappa) == doctest::Approx(1.5).epsilon(0.08));
}

TEST_CASE("posterior proportions close the simplex every replicate") {
  const MnStmModel model = desk_model(2, 75);
  ChainConfig config;
  config.iterations = 150;
  config.seed = 3;
  const Chain chain = run_mnstm(model, config);
  const ProportionReplicates reps = posterior_proportions(chain, model, 123);
  for (int b = 0; b < reps.B; ++b) {
    for (int i = 0; i < reps.N; ++i) {
      for (int t = 0; t < reps.T; ++t) {
        double total = 0.0;
        for (int k = 0; k < reps.K; ++k) {
          const double pi = reps.at(b, k, i, t);
          CHECK(pi > 0.0);
          CHECK(pi < 1.0);
          total += pi;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("zero state cascades to halving proportions") {
  const MnStmModel model = desk_model(1, 76);
  Chain chain;
  ChainState zero = model.initial_state();
  chain.states.assign(1, zero);
  chain.log_joint_trace.assign(1, 0.0);
  chain.iteration_index.assign(1, 0);
  const ProportionReplicates reps = posterior_proportions(chain, model, 9);
  // all cells are active at observed units, so nu = 0 exactly there
  for (int i = 0; i < model.N(); ++i) {
    if (!model.panel().is_observed(i, 0)) continue;
    if (!model.is_active(0, i, 0) || !model.is_active(1, i, 0)) continue;
    CHECK(reps.at(0, 0, i, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(reps.at(0, 1, i, 0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(reps.at(0, 2, i, 0) == doctest::Approx(0.25).epsilon(1e-14));
  }
}

TEST_CASE("proportion replicates invert the stick transform") {
  const MnStmModel model = desk_model(2, 77);
  ChainConfig config;
  config.iterations = 40;
  config.seed = 21;
  const Chain chain = run_mnstm(model, config);
  const ProportionReplicates reps = posterior_proportions(chain, model, 55);
  // recompute one replicate's pi at an active cell independently
  const int b = 2;
  const ChainState& state = chain.states[b];
  for (int i = 0; i < model.N(); ++i) {
    for (int t = 0; t < model.T(); ++t) {
      bool all_active = true;
      for (int k = 0; k < model.K() - 1; ++k) {
        all_active = all_active && model.is_active(k, i, t);
      }
      if (!all_active) continue;
      Eigen::VectorXd p(model.K() - 1);
      for (int k = 0; k < model.K() - 1; ++k) {
        p[k] = sigmoid(model.nu_cell(state, k, i, t));
      }
      const Eigen::VectorXd pi = stick_break_inverse(p);
      for (int k = 0; k < model.K(); ++k) {
        CHECK(reps.at(b, k, i, t) == doctest::Approx(pi[k]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("shape kernels are numerically log-concave at sampled states") {
  const MnStmModel model = desk_model(2, 78);
  ChainConfig config;
  config.iterations = 30;
  config.seed = 13;
  const Chain chain = run_mnstm(model, config);
  const ChainState& state = chain.states.back();
  for (const ShapeKernel& kernel : shape_kernels(model, state)) {
    const double lo = kernel.lower + (std::isfinite(kernel.upper)
                                          ? 1e-4 * (kernel.upper - kernel.lower)
                                          : 1e-4);
    const double hi = std::isfinite(kernel.upper)
                          ? kernel.upper - 1e-4 * (kernel.upper - kernel.lower)
                          : kernel.lower + 12.0;
    const int points = 200;
    const double step = (hi - lo) / (points - 1);
    double scale = 1.0;
    std::vector<double> values(points);
    for (int g = 0; g < points; ++g) {
      values[g] = kernel.log_density(lo + g * step);
      scale = std::max(scale, std::abs(values[g]));
    }
    for (int g = 1; g + 1 < points; ++g) {
      const double second = values[g - 1] - 2.0 * values[g] + values[g + 1];
      CHECK(second <= 1e-8 * scale);
    }
  }
}

TEST_CASE("beta-binomial micro case is exact") {
  // one unit, two categories, no covariates or basis, fixed shapes: the
  // success-logit prior is a plain logit-beta and the posterior is the
  // closed-form beta-binomial update.
  CountPanel panel = CountPanel::zeros(2, 1, 1);
  panel.y(0, 0, 0) = 7;
  panel.y(1, 0, 0) = 3;
  Eigen::MatrixXd x(1, 0);
  Eigen::MatrixXd phi(1, 0);
  const BasisSystem basis = make_direct_basis(x, phi);
  MnStmSpec spec;
  spec.regularized = false;
  spec.fixed_shapes = true;
  spec.init_alpha = 1.0;
  spec.init_kappa = 2.0;
  const MnStmModel model = assemble_mnstm(panel, basis, spec);

  ChainConfig config;
  config.iterations = 22000;
  config.burn_in = 2000;
  config.seed = 77;
  const Chain chain = run_lmlb(model, config);
  std::vector<double> p_draws;
  for (const auto& s : chain.states) {
    p_draws.push_back(sigmoid(s.xi[0][0]));
  }
  // posterior is Beta(1 + 7, (2 - 1) + 3)
  const double expected = 8.0 / 12.0;
  const double mc_se =
      std::sqrt(testutil::sample_variance(p_draws) / p_draws.size());
  CHECK(std::abs(testutil::sample_mean(p_draws) - expected) < 3.0 * mc_se);
}
