#include "mnstm/runner.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <ostream>
#include <stdexcept>

#include "mnstm/conditionals.hpp"
#include "mnstm/diagnostics.hpp"
#include "mnstm/io.hpp"
#include "mnstm/logit_beta.hpp"
#include "mnstm/mlb.hpp"
#include "mnstm/polya_gamma.hpp"
#include "mnstm/special_functions.hpp"

namespace mnstm {

namespace {

using nlohmann::json;

std::string epsilon_mode_name(EpsilonMode mode) {
  return mode == EpsilonMode::kHalfSplit ? "half" : "empirical";
}

EpsilonMode epsilon_mode_from(const std::string& name) {
  if (name == "half") return EpsilonMode::kHalfSplit;
  if (name == "empirical") return EpsilonMode::kEmpiricalBayes;
  throw std::invalid_argument("unknown epsilon_mode: " + name);
}

std::string variant_name(SimVariant variant) {
  return variant == SimVariant::kStaticLmlb ? "static-lmlb" : "empirical-mnstm";
}

SimVariant variant_from(const std::string& name) {
  if (name == "static-lmlb") return SimVariant::kStaticLmlb;
  if (name == "empirical-mnstm") return SimVariant::kEmpiricalMnstm;
  throw std::invalid_argument("unknown simulation variant: " + name);
}

json spec_to_json(const MnStmSpec& spec) {
  return json{{"sigma", spec.sigma},
              {"rho", spec.rho},
              {"epsilon", spec.epsilon},
              {"epsilon_mode", epsilon_mode_name(spec.epsilon_mode)},
              {"delta_constant", spec.delta_constant},
              {"regularized", spec.regularized},
              {"a_beta", spec.a_beta},
              {"tau_beta", spec.tau_beta},
              {"a_beta1", spec.a_beta1},
              {"tau_beta1", spec.tau_beta1},
              {"a_eta", spec.a_eta},
              {"tau_eta", spec.tau_eta},
              {"a_eta1", spec.a_eta1},
              {"tau_eta1", spec.tau_eta1},
              {"a_xi", spec.a_xi},
              {"tau_xi", spec.tau_xi},
              {"a_xi1", spec.a_xi1},
              {"tau_xi1", spec.tau_xi1},
              {"fixed_shapes", spec.fixed_shapes},
              {"init_alpha", spec.init_alpha},
              {"init_kappa", spec.init_kappa}};
}

void spec_from_json(const json& j, MnStmSpec& spec) {
  spec.sigma = j.value("sigma", spec.sigma);
  spec.rho = j.value("rho", spec.rho);
  spec.epsilon = j.value("epsilon", spec.epsilon);
  if (j.contains("epsilon_mode")) {
    spec.epsilon_mode = epsilon_mode_from(j["epsilon_mode"].get<std::string>());
  }
  spec.delta_constant = j.value("delta_constant", spec.delta_constant);
  spec.regularized = j.value("regularized", spec.regularized);
  spec.a_beta = j.value("a_beta", spec.a_beta);
  spec.tau_beta = j.value("tau_beta", spec.tau_beta);
  spec.a_beta1 = j.value("a_beta1", spec.a_beta1);
  spec.tau_beta1 = j.value("tau_beta1", spec.tau_beta1);
  spec.a_eta = j.value("a_eta", spec.a_eta);
  spec.tau_eta = j.value("tau_eta", spec.tau_eta);
  spec.a_eta1 = j.value("a_eta1", spec.a_eta1);
  spec.tau_eta1 = j.value("tau_eta1", spec.tau_eta1);
  spec.a_xi = j.value("a_xi", spec.a_xi);
  spec.tau_xi = j.value("tau_xi", spec.tau_xi);
  spec.a_xi1 = j.value("a_xi1", spec.a_xi1);
  spec.tau_xi1 = j.value("tau_xi1", spec.tau_xi1);
  spec.fixed_shapes = j.value("fixed_shapes", spec.fixed_shapes);
  spec.init_alpha = j.value("init_alpha", spec.init_alpha);
  spec.init_kappa = j.value("init_kappa", spec.init_kappa);
}

json config_to_json(const RunConfig& config) {
  return json{{"counts", config.counts_path},
              {"adjacency", config.adjacency_path},
              {"covariates", config.covariates_path},
              {"truth", config.truth_path},
              {"totals", config.totals_path},
              {"output_dir", config.output_dir},
              {"model", config.model},
              {"rank", config.rank},
              {"spec", spec_to_json(config.model_spec)},
              {"chain",
               {{"iterations", config.chain.iterations},
                {"burn_in", config.chain.burn_in},
                {"thinning", config.chain.thinning},
                {"seed", config.chain.seed},
                {"n_chains", config.chain.n_chains}}},
              {"simulate_only", config.simulate_only},
              {"design",
               {{"variant", variant_name(config.design.variant)},
                {"n_units", config.design.n_units},
                {"k_categories", config.design.k_categories},
                {"t_points", config.design.t_points},
                {"rank", config.design.rank},
                {"observed_fraction", config.design.observed_fraction},
                {"cell_total", config.design.cell_total}}}};
}

void config_from_json(const json& j, RunConfig& config) {
  config.counts_path = j.value("counts", config.counts_path);
  config.adjacency_path = j.value("adjacency", config.adjacency_path);
  config.covariates_path = j.value("covariates", config.covariates_path);
  config.truth_path = j.value("truth", config.truth_path);
  config.totals_path = j.value("totals", config.totals_path);
  config.output_dir = j.value("output_dir", config.output_dir);
  config.model = j.value("model", config.model);
  config.rank = j.value("rank", config.rank);
  if (j.contains("spec")) spec_from_json(j["spec"], config.model_spec);
  if (j.contains("chain")) {
    const json& c = j["chain"];
    config.chain.iterations = c.value("iterations", config.chain.iterations);
    config.chain.burn_in = c.value("burn_in", config.chain.burn_in);
    config.chain.thinning = c.value("thinning", config.chain.thinning);
    config.chain.seed = c.value("seed", config.chain.seed);
    config.chain.n_chains = c.value("n_chains", config.chain.n_chains);
  }
  config.simulate_only = j.value("simulate_only", config.simulate_only);
  if (j.contains("design")) {
    const json& d = j["design"];
    if (d.contains("variant")) {
      config.design.variant = variant_from(d["variant"].get<std::string>());
    }
    config.design.n_units = d.value("n_units", config.design.n_units);
    config.design.k_categories = d.value("k_categories", config.design.k_categories);
    config.design.t_points = d.value("t_points", config.design.t_points);
    config.design.rank = d.value("rank", config.design.rank);
    config.design.observed_fraction =
        d.value("observed_fraction", config.design.observed_fraction);
    config.design.cell_total = d.value("cell_total", config.design.cell_total);
  }
}

void write_manifest(const RunConfig& config, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << config_to_json(config).dump(2) << '\n';
}

void write_trace(const Chain& chain, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path);
  if (chain.states.empty()) return;
  const ChainState& first = chain.states.front();
  out << "iteration,log_joint,alpha_beta,kappa_beta";
  for (int t = 0; t < first.shapes.alpha_eta.size(); ++t) {
    out << ",alpha_eta_" << t << ",kappa_eta_" << t;
  }
  for (int t = 0; t < first.shapes.alpha_xi.size(); ++t) {
    out << ",alpha_xi_" << t << ",kappa_xi_" << t;
  }
  for (int j = 0; j < first.beta.size(); ++j) out << ",beta_" << j;
  out << '\n';
  char buf[40];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (std::size_t b = 0; b < chain.states.size(); ++b) {
    const ChainState& s = chain.states[b];
    out << chain.iteration_index[b] << ',' << fmt(chain.log_joint_trace[b])
        << ',' << fmt(s.shapes.alpha_beta) << ',' << fmt(s.shapes.kappa_beta);
    for (int t = 0; t < s.shapes.alpha_eta.size(); ++t) {
      out << ',' << fmt(s.shapes.alpha_eta[t]) << ','
          << fmt(s.shapes.kappa_eta[t]);
    }
    for (int t = 0; t < s.shapes.alpha_xi.size(); ++t) {
      out << ',' << fmt(s.shapes.alpha_xi[t]) << ',' << fmt(s.shapes.kappa_xi[t]);
    }
    for (int j = 0; j < s.beta.size(); ++j) out << ',' << fmt(s.beta[j]);
    out << '\n';
  }
}

int run_impl(const RunConfig& config, std::ostream& log) {
  namespace fs = std::filesystem;
  if (const char* threads = std::getenv("MNSTM_THREADS")) {
    const int count = std::atoi(threads);
    if (count > 0) Eigen::setNbThreads(count);
  }
  fs::create_directories(config.output_dir);
  const auto out_path = [&](const std::string& name) {
    return (fs::path(config.output_dir) / name).string();
  };

  if (config.simulate_only) {
    const SimulatedData sim = simulate_panel(config.design, config.chain.seed);
    save_count_panel(sim.panel, out_path("counts.csv"));
    save_probability_tensor(sim.truth, sim.panel.K, sim.panel.N, sim.panel.T,
                            out_path("truth.csv"));
    {
      std::vector<double> totals(
          static_cast<std::size_t>(sim.panel.N) * sim.panel.T, 0.0);
      for (int i = 0; i < sim.panel.N; ++i) {
        for (int t = 0; t < sim.panel.T; ++t) {
          totals[static_cast<std::size_t>(i) * sim.panel.T + t] =
              static_cast<double>(sim.panel.total(i, t));
        }
      }
      save_totals(totals, sim.panel.N, sim.panel.T, out_path("totals.csv"));
    }
    if (config.design.variant == SimVariant::kEmpiricalMnstm) {
      save_adjacency(sim.unit_adj, out_path("adjacency.txt"));
    }
    write_manifest(config, out_path("manifest.json"));
    log << "[simulate] wrote counts/truth to " << config.output_dir << "\n";
    return 0;
  }

  // ---- load ----
  if (config.counts_path.empty()) {
    throw std::invalid_argument("[load] counts path is required");
  }
  const CountPanel panel = load_count_panel(config.counts_path);
  log << "[load] panel K=" << panel.K << " N=" << panel.N << " T=" << panel.T
      << "\n";

  std::vector<Eigen::MatrixXd> x_pred;
  Eigen::MatrixXd static_phi;
  if (!config.covariates_path.empty()) {
    x_pred = load_covariates(config.covariates_path, panel.K, panel.N, panel.T);
  } else if (config.model == "lmlb") {
    Eigen::MatrixXd x;
    static_design_matrices(panel.K, panel.N, config.rank, x, static_phi);
    x_pred.assign(1, x);
  } else {
    x_pred = indicator_covariates(panel.K, panel.N, panel.T);
  }

  // ---- assemble ----
  BasisSystem basis;
  std::vector<std::string> warnings;
  if (config.model == "lmlb") {
    if (panel.T != 1) {
      throw std::invalid_argument("[assemble] lmlb requires a single time point");
    }
    if (static_phi.size() == 0) {
      static_phi = null_space_basis(orth_basis(x_pred[0])).leftCols(config.rank);
    }
    basis = make_direct_basis(x_pred[0], static_phi);
  } else if (config.model == "mnstm") {
    if (config.adjacency_path.empty()) {
      throw std::invalid_argument("[assemble] mnstm requires an adjacency file");
    }
    const Adjacency adj = load_adjacency(config.adjacency_path, panel.N);
    basis = build_basis_system(panel, adj, x_pred, config.rank,
                               config.model_spec.init_alpha,
                               config.model_spec.init_kappa, nullptr, &warnings);
  } else {
    throw std::invalid_argument("[assemble] unknown model: " + config.model);
  }
  for (const auto& w : warnings) log << "[assemble] warning: " << w << "\n";
  const MnStmModel model = assemble_mnstm(panel, basis, config.model_spec);

  // ---- sample ----
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<Chain> chains = run_chains(model, config.chain);
  Chain pooled;
  for (const auto& c : chains) {
    pooled.states.insert(pooled.states.end(), c.states.begin(), c.states.end());
    pooled.log_joint_trace.insert(pooled.log_joint_trace.end(),
                                  c.log_joint_trace.begin(),
                                  c.log_joint_trace.end());
    pooled.iteration_index.insert(pooled.iteration_index.end(),
                                  c.iteration_index.begin(),
                                  c.iteration_index.end());
  }
  const ProportionReplicates reps =
      posterior_proportions(pooled, model, config.chain.seed + 0x9e3779b9ULL);
  const auto t1 = std::chrono::steady_clock::now();
  log << "[sample] " << chains.size() << " chain(s), " << pooled.states.size()
      << " kept states\n";

  // ---- export ----
  const PosteriorSummary summary = summarize_proportions(reps);
  write_posterior_summary(summary, out_path("posterior_summary.csv"));
  write_trace(chains.front(), out_path("trace.csv"));

  json diag;
  diag["chain"] = {{"kept_states", pooled.states.size()},
                   {"chains", chains.size()}};
  diag["ess"] = {{"median_cell", median_cell_ess(reps)},
                 {"variant", "autocorrelation-monotone"}};
  if (chains.size() >= 2) {
    std::vector<Eigen::VectorXd> log_joint_chains;
    for (const auto& c : chains) {
      log_joint_chains.push_back(Eigen::Map<const Eigen::VectorXd>(
          c.log_joint_trace.data(), c.log_joint_trace.size()));
    }
    const EssReport wb = ess_within_between(log_joint_chains);
    diag["ess"]["log_joint_within_between"] = wb.ess;
  }
  diag["runtime_seconds"] =
      std::chrono::duration<double>(t1 - t0).count();
  if (!config.truth_path.empty()) {
    const std::vector<double> truth =
        load_probability_tensor(config.truth_path, panel.K, panel.N, panel.T);
    std::vector<double> totals;
    if (!config.totals_path.empty()) {
      totals = load_totals(config.totals_path, panel.N, panel.T);
    } else {
      totals.assign(static_cast<std::size_t>(panel.N) * panel.T, 0.0);
      for (int i = 0; i < panel.N; ++i) {
        for (int t = 0; t < panel.T; ++t) {
          totals[static_cast<std::size_t>(i) * panel.T + t] =
              static_cast<double>(panel.total(i, t));
        }
      }
    }
    const MraeReport mrae = median_relative_absolute_error(
        truth, totals, summary.mean, panel.K, panel.N, panel.T);
    diag["mrae"] = {{"median", mrae.median},
                    {"included", mrae.included},
                    {"excluded_zero_denominator", mrae.excluded_zero_denominator}};
    diag["coverage_95"] = coverage_report(reps, truth, 0.95);
  }
  {
    std::ofstream out(out_path("diagnostics.json"), std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write diagnostics.json");
    out << diag.dump(2) << '\n';
  }
  write_manifest(config, out_path("manifest.json"));
  log << "[export] posterior_summary.csv, diagnostics.json, trace.csv, "
         "manifest.json\n";
  return 0;
}

// ---------------------------------------------------------------------------
// property batteries

// Distribution of the transformed draw via direct numerical convolution of
// the scaled independent components; independent of the sampling route.
struct MarginalOracle {
  std::vector<double> grid;
  std::vector<double> cdf;

  double operator()(double x) const {
    if (x <= grid.front()) return 0.0;
    if (x >= grid.back()) return 1.0;
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - grid.begin());
    const double w = (x - grid[j - 1]) / (grid[j] - grid[j - 1]);
    return cdf[j - 1] * (1.0 - w) + cdf[j] * w;
  }
};

MarginalOracle marginal_oracle(const Eigen::MatrixXd& h,
                               const Eigen::VectorXd& mu,
                               const Eigen::VectorXd& alpha,
                               const Eigen::VectorXd& kappa, int n_grid) {
  if (n_grid % 2 == 0) ++n_grid;
  const int m = static_cast<int>(h.rows());
  const Eigen::VectorXd weights = h / h.squaredNorm();  // (H'H)^{-1} H' rows
  double total_shift = 0.0;
  double spread = 0.0;
  std::vector<int> used;
  for (int i = 0; i < m; ++i) {
    if (std::abs(weights[i]) < 1e-14) continue;
    const LogitBetaParams lb{alpha[i], kappa[i]};
    total_shift += weights[i] * (mu[i] + logit_beta_mean(lb));
    spread += weights[i] * weights[i] * logit_beta_variance(lb);
    used.push_back(i);
  }
  const double half = 14.0 * std::sqrt(spread) + 1.0;
  const double step = 2.0 * half / (n_grid - 1);
  const int n0 = (n_grid - 1) / 2;

  // density of a_i (w_i - mean_i) on the centered grid
  auto component_density = [&](int i) {
    std::vector<double> f(n_grid, 0.0);
    const LogitBetaParams lb{alpha[i], kappa[i]};
    const double a = weights[i];
    const double mean_i = logit_beta_mean(lb);
    for (int g = 0; g < n_grid; ++g) {
      const double z = (g - n0) * step;
      f[g] = std::exp(logit_beta_logpdf(z / a + mean_i, lb)) / std::abs(a);
    }
    return f;
  };
  std::vector<double> acc = component_density(used.front());
  for (std::size_t u = 1; u < used.size(); ++u) {
    const std::vector<double> f = component_density(used[u]);
    std::vector<double> next(n_grid, 0.0);
    for (int g = 0; g < n_grid; ++g) {
      double s = 0.0;
      for (int q = 0; q < n_grid; ++q) {
        const int d = g - q + n0;
        if (d >= 0 && d < n_grid) s += acc[d] * f[q];
      }
      next[g] = s * step;
    }
    acc.swap(next);
  }
  MarginalOracle oracle;
  oracle.grid.resize(n_grid);
  oracle.cdf.resize(n_grid);
  double total = 0.0;
  oracle.grid[0] = -half + total_shift;
  oracle.cdf[0] = 0.0;
  for (int g = 1; g < n_grid; ++g) {
    oracle.grid[g] = (g - n0) * step + total_shift;
    total += 0.5 * (acc[g - 1] + acc[g]) * step;
    oracle.cdf[g] = total;
  }
  for (double& c : oracle.cdf) c /= total;
  return oracle;
}

double ks_distance(std::vector<double> draws, const MarginalOracle& oracle) {
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double d = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double f = oracle(draws[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

struct CheckPrinter {
  std::ostream& out;
  bool all_ok = true;

  void report(const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "[PASS] " : "[FAIL] ") << name << " (" << detail << ")\n";
    all_ok = all_ok && ok;
  }
};

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  json j;
  in >> j;
  RunConfig config;
  config_from_json(j, config);
  return config;
}

int run(const RunConfig& config, std::ostream& log) {
  try {
    return run_impl(config, log);
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    log << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}

int validate_properties(std::ostream& out, bool quick) {
  CheckPrinter printer{out};
  const int ks_draws = quick ? 20000 : 100000;
  const int pg_draws = quick ? 200000 : 1000000;

  // sampling identity of the transformed-draw route
  {
    Eigen::MatrixXd h(3, 1);
    h << 1.0, -0.6, 0.8;
    Eigen::VectorXd mu(3), alpha(3), kappa(3);
    mu << 0.3, -0.2, 0.5;
    alpha << 1.5, 2.0, 0.8;
    kappa << 3.0, 4.0, 2.0;
    const MarginalOracle oracle = marginal_oracle(h, mu, alpha, kappa, 2001);
    const Eigen::MatrixXd draws =
        marginal_mlb_sample(h, mu, alpha, kappa, ks_draws, 20240u);
    std::vector<double> flat(draws.data(), draws.data() + draws.rows());
    const double d = ks_distance(flat, oracle);
    printer.report("marginal sampling identity", d < 0.05,
                   "KS distance " + std::to_string(d));
  }
  // propagator stability
  {
    Rng rng(7u);
    Eigen::MatrixXd gauss(3, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) gauss(i, j) = rng.normal();
    }
    const Eigen::MatrixXd psi = orth_basis(gauss);
    const StabilityReport report = stability_analysis({psi}, 0.5, 60);
    const double err =
        std::abs(report.partial_sums[report.partial_sums.size() - 1] -
                 report.limit);
    printer.report("propagator stability partial sums",
                   report.converged && err < 1e-6,
                   "limit error " + std::to_string(err));
  }
  // precision factor reconstruction
  {
    Rng rng(11u);
    Eigen::MatrixXd gauss(6, 3);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 3; ++j) gauss(i, j) = rng.normal();
    }
    const Eigen::MatrixXd phi_pred = orth_basis(gauss);
    const Eigen::MatrixXd phi_obs = phi_pred.topRows(4);
    const Adjacency adj = grid_adjacency(6);
    const Eigen::MatrixXd target =
        Eigen::MatrixXd::Identity(6, 6) - adj.edges;
    const PrecisionSolve solve =
        solve_precision_factor(phi_pred, phi_obs, target, 1.3, 3.1);
    const Eigen::MatrixXd sigma_star = positive_approximant(
        phi_pred.transpose() * target * phi_pred -
        phi_obs.transpose() * phi_obs);
    const double rec = (solve.v.transpose() * solve.v - sigma_star).norm();
    const double sig_err =
        std::abs(solve.sigma_eta_sq - (trigamma(1.3) + trigamma(3.1 - 1.3)));
    printer.report("precision factor reconstruction",
                   rec < 1e-10 && sig_err < 1e-12,
                   "frobenius " + std::to_string(rec));
  }
  // logistic-to-Gaussian mixture identity
  {
    const double rel = verify_pg_identity(1.0, 2.0, 1.5, pg_draws, 99u);
    printer.report("mixture identity", rel < 0.02,
                   "relative error " + std::to_string(rel));
  }
  // conjugacy of the full-conditional builders
  {
    SimDesign design;
    design.variant = SimVariant::kEmpiricalMnstm;
    design.n_units = 6;
    design.k_categories = 3;
    design.t_points = 3;
    design.rank = 3;
    design.observed_fraction = 1.0;
    design.cell_total = 25;
    const SimulatedData sim = simulate_panel(design, 5u);
    const BasisSystem basis =
        build_basis_system(sim.panel, sim.unit_adj, sim.x_pred, design.rank);
    MnStmSpec spec;
    const MnStmModel model = assemble_mnstm(sim.panel, basis, spec);
    ChainState state = model.initial_state();
    Rng rng(3u);
    for (int j = 0; j < state.beta.size(); ++j) state.beta[j] = 0.3 * rng.normal();
    for (int t = 0; t < model.T(); ++t) {
      for (int j = 0; j < model.rank(); ++j) state.eta[t][j] = 0.3 * rng.normal();
      for (int a = 0; a < model.active_count(t); ++a) {
        state.xi[t][a] = 0.3 * rng.normal();
      }
    }
    double worst = 0.0;
    auto grid_std = [&](const FullConditionalSpec& spec_block,
                        const Eigen::VectorXd& base,
                        const std::function<void(const Eigen::VectorXd&)>& set) {
      Eigen::VectorXd dir(base.size());
      for (int j = 0; j < dir.size(); ++j) dir[j] = rng.normal();
      dir.normalize();
      std::vector<double> diffs;
      for (int g = 0; g < 25; ++g) {
        const double s = -1.0 + 2.0 * g / 24.0;
        const Eigen::VectorXd q = base + s * dir;
        set(q);
        diffs.push_back(model.log_joint(state) - spec_block.logkernel(q));
      }
      set(base);
      double mean = 0.0;
      for (const double d : diffs) mean += d;
      mean /= diffs.size();
      double ss = 0.0;
      for (const double d : diffs) ss += (d - mean) * (d - mean);
      return std::sqrt(ss / diffs.size());
    };
    {
      const auto spec_block = build_beta_conditional(model, state);
      const Eigen::VectorXd base = state.beta;
      worst = std::max(worst, grid_std(spec_block, base,
                                       [&](const Eigen::VectorXd& q) {
                                         state.beta = q;
                                       }));
    }
    for (const int t : {0, 1, 2}) {
      const auto spec_block = build_eta_conditional(model, state, t);
      const Eigen::VectorXd base = state.eta[t];
      worst = std::max(worst, grid_std(spec_block, base,
                                       [&](const Eigen::VectorXd& q) {
                                         state.eta[t] = q;
                                       }));
    }
    {
      const auto spec_block = build_xi_conditional(model, state, 1);
      const Eigen::VectorXd base = state.xi[1];
      worst = std::max(worst, grid_std(spec_block, base,
                                       [&](const Eigen::VectorXd& q) {
                                         state.xi[1] = q;
                                       }));
    }
    printer.report("full-conditional conjugacy", worst < 1e-8,
                   "max grid std " + std::to_string(worst));
  }
  return printer.all_ok ? 0 : 2;
}

}  // namespace mnstm
