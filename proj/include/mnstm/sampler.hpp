#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mnstm/model.hpp"

namespace mnstm {

// One shape-parameter full conditional: a log-concave kernel on an open
// interval. The kappa kernels live on (alpha, inf); the alpha kernels on
// (0, kappa).
struct ShapeKernel {
  std::string label;
  double lower = 0.0;
  double upper = 0.0;
  std::function<double(double)> log_density;
};

// All shape-parameter kernels of the model at the given state, in sweep
// order: the regression pair, then per time the random-effect pair and the
// fine-scale pair.
std::vector<ShapeKernel> shape_kernels(const MnStmModel& model,
                                       const ChainState& state);

struct ChainConfig {
  int iterations = 1000;
  int burn_in = -1;  // -1 resolves to iterations / 10
  int thinning = 1;
  std::uint64_t seed = 1;
  int n_chains = 1;

  int resolved_burn_in() const {
    return burn_in < 0 ? iterations / 10 : burn_in;
  }
  void validate() const;
};

struct Chain {
  std::vector<ChainState> states;        // thinned, post burn-in
  std::vector<double> log_joint_trace;   // aligned with states
  std::vector<int> iteration_index;
};

// Full sweep order: beta, eta_1..eta_T, xi_1..xi_T, then the shape
// parameters. Shape draws use adaptive rejection on their log-concave
// kernels; the precision-factor variance scale is refreshed after them.
Chain run_mnstm(const MnStmModel& model, const ChainConfig& config);

// Static (T = 1) latent model; identical sweep on a direct-basis assembly.
Chain run_lmlb(const MnStmModel& model, const ChainConfig& config);

// Independent chains with seeds config.seed, config.seed + 1, ...
std::vector<Chain> run_chains(const MnStmModel& model,
                              const ChainConfig& config);

// Per-replicate category proportions over the full prediction grid.
// Fine-scale effects at cells outside the likelihood are drawn from their
// prior under the replicate's shape state.
struct ProportionReplicates {
  int K = 0, N = 0, T = 0, B = 0;
  std::vector<double> values;  // ((b*K + k)*N + i)*T + t

  double at(int b, int k, int i, int t) const {
    return values[static_cast<std::size_t>(((b * K + k) * N + i)) * T + t];
  }
  std::vector<double> cell_series(int k, int i, int t) const;
};

ProportionReplicates posterior_proportions(const Chain& chain,
                                           const MnStmModel& model,
                                           std::uint64_t seed);

}  // namespace mnstm
