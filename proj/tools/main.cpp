#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>

#include "mnstm/diagnostics.hpp"
#include "mnstm/io.hpp"
#include "mnstm/runner.hpp"

namespace {

void add_common_flags(CLI::App* cmd, mnstm::RunConfig& config) {
  cmd->add_option("--counts", config.counts_path, "counts CSV (k,i,t,y)");
  cmd->add_option("--adjacency", config.adjacency_path,
                  "edge list, one `i j` pair per line");
  cmd->add_option("--covariates", config.covariates_path,
                  "covariate CSV over the full grid");
  cmd->add_option("--truth", config.truth_path,
                  "true probabilities CSV (enables error metrics)");
  cmd->add_option("--totals", config.totals_path,
                  "full-grid cell totals CSV (i,t,m) for the error metrics");
  cmd->add_option("--out", config.output_dir, "output directory");
  cmd->add_option("--model", config.model, "mnstm | lmlb");
  cmd->add_option("--rank", config.rank, "basis rank r");
  cmd->add_option("--iterations", config.chain.iterations);
  cmd->add_option("--burn-in", config.chain.burn_in);
  cmd->add_option("--thinning", config.chain.thinning);
  cmd->add_option("--seed", config.chain.seed);
  cmd->add_option("--chains", config.chain.n_chains);
  cmd->add_option("--sigma", config.model_spec.sigma);
  cmd->add_option("--rho", config.model_spec.rho);
  cmd->add_option("--epsilon", config.model_spec.epsilon);
  cmd->add_option("--delta", config.model_spec.delta_constant,
                  "constant delta override (default: stick trial counts)");
  cmd->add_flag("--fixed-shapes", config.model_spec.fixed_shapes);
  cmd->add_option_function<std::string>(
      "--epsilon-mode",
      [&config](const std::string& v) {
        if (v == "half") {
          config.model_spec.epsilon_mode = mnstm::EpsilonMode::kHalfSplit;
        } else if (v == "empirical") {
          config.model_spec.epsilon_mode = mnstm::EpsilonMode::kEmpiricalBayes;
        } else {
          throw CLI::ValidationError("--epsilon-mode", "use half|empirical");
        }
      },
      "half | empirical");
}

void add_design_flags(CLI::App* cmd, mnstm::RunConfig& config) {
  cmd->add_option_function<std::string>(
      "--design",
      [&config](const std::string& v) {
        if (v == "static-lmlb") {
          config.design.variant = mnstm::SimVariant::kStaticLmlb;
        } else if (v == "empirical-mnstm") {
          config.design.variant = mnstm::SimVariant::kEmpiricalMnstm;
        } else {
          throw CLI::ValidationError("--design",
                                     "use static-lmlb|empirical-mnstm");
        }
      },
      "static-lmlb | empirical-mnstm");
  cmd->add_option("--n-units", config.design.n_units);
  cmd->add_option("--categories", config.design.k_categories);
  cmd->add_option("--time-points", config.design.t_points);
  cmd->add_option("--design-rank", config.design.rank);
  cmd->add_option("--observed-fraction", config.design.observed_fraction);
  cmd->add_option("--cell-total", config.design.cell_total);
}

// The config file supplies defaults; any flag given on the command line
// wins because it is parsed on top of the preloaded values.
std::string prescan_config_path(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") return argv[i + 1];
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  mnstm::RunConfig config;
  const std::string config_path = prescan_config_path(argc, argv);
  if (!config_path.empty()) {
    try {
      config = mnstm::load_run_config(config_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }

  CLI::App app{"multinomial spatio-temporal mixed-effects sampler"};
  app.require_subcommand(1);
  std::string config_path_sink;

  CLI::App* fit = app.add_subcommand("fit", "fit a model to a count panel");
  fit->add_option("--config", config_path_sink, "JSON config file");
  add_common_flags(fit, config);

  CLI::App* simulate =
      app.add_subcommand("simulate", "write a synthetic count panel");
  simulate->add_option("--config", config_path_sink, "JSON config file");
  add_common_flags(simulate, config);
  add_design_flags(simulate, config);

  struct DiagnoseOpts {
    std::string summary_path, truth_path, counts_path;
  } diag_opts;
  CLI::App* diagnose =
      app.add_subcommand("diagnose", "error metrics for a finished run");
  diagnose->add_option("--summary", diag_opts.summary_path)->required();
  diagnose->add_option("--truth", diag_opts.truth_path)->required();
  diagnose->add_option("--counts", diag_opts.counts_path)->required();

  bool props_full = false;
  CLI::App* props = app.add_subcommand(
      "validate-props", "run the distribution-identity check batteries");
  props->add_flag("--full", props_full, "full-size Monte Carlo batteries");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) {
      config.simulate_only = false;
      return mnstm::run(config, std::cout);
    }
    if (simulate->parsed()) {
      config.simulate_only = true;
      return mnstm::run(config, std::cout);
    }
    if (diagnose->parsed()) {
      const mnstm::PosteriorSummary summary =
          mnstm::load_posterior_summary(diag_opts.summary_path);
      const mnstm::CountPanel panel =
          mnstm::load_count_panel(diag_opts.counts_path);
      const std::vector<double> truth = mnstm::load_probability_tensor(
          diag_opts.truth_path, summary.K, summary.N, summary.T);
      std::vector<double> totals(static_cast<std::size_t>(panel.N) * panel.T);
      for (int i = 0; i < panel.N; ++i) {
        for (int t = 0; t < panel.T; ++t) {
          totals[static_cast<std::size_t>(i) * panel.T + t] =
              static_cast<double>(panel.total(i, t));
        }
      }
      const mnstm::MraeReport mrae = mnstm::median_relative_absolute_error(
          truth, totals, summary.mean, summary.K, summary.N, summary.T);
      std::size_t covered = 0;
      const std::size_t cells = summary.mean.size();
      for (std::size_t c = 0; c < cells; ++c) {
        if (truth[c] >= summary.q025[c] && truth[c] <= summary.q975[c]) {
          ++covered;
        }
      }
      std::cout << "mrae_median=" << mrae.median << " cells=" << mrae.included
                << " interval_coverage="
                << static_cast<double>(covered) / static_cast<double>(cells)
                << "\n";
      return 0;
    }
    if (props->parsed()) {
      return mnstm::validate_properties(std::cout, !props_full);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
