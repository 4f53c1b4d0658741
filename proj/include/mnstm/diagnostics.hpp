#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "mnstm/sampler.hpp"

namespace mnstm {

struct EssReport {
  double ess = 0.0;
  int chain_length = 0;
  bool degenerate = false;  // constant trace; ess reported as the length
  std::string variant;
};

// Autocorrelation estimator with initial-monotone-sequence truncation:
// ess = B / (1 + 2 sum rho_k).
EssReport effective_sample_size(const Eigen::VectorXd& trace);

// Multi-chain variant: B_total times the ratio of the mean within-chain
// variance to the between-chain variance of the chain means.
EssReport ess_within_between(const std::vector<Eigen::VectorXd>& chains);

struct MraeReport {
  std::vector<double> errors;
  double median = 0.0;
  int included = 0;
  int excluded_zero_denominator = 0;
};

// Median over cells of |m pi_hat - m pi| / (m pi (1 - pi)). Tensors are
// indexed (k*N + i)*T + t; totals indexed i*T + t. Cells with a zero
// denominator are excluded and counted.
MraeReport median_relative_absolute_error(const std::vector<double>& truth,
                                          const std::vector<double>& totals,
                                          const std::vector<double>& estimate,
                                          int K, int N, int T);

// Fraction of cells whose equal-tailed interval at `level` covers the
// truth.
double coverage_report(const ProportionReplicates& replicates,
                       const std::vector<double>& truth, double level);

struct PosteriorSummary {
  int K = 0, N = 0, T = 0;
  std::vector<double> mean, sd, q025, q975;  // (k*N + i)*T + t

  std::size_t cell(int k, int i, int t) const {
    return static_cast<std::size_t>((k * N + i)) * T + t;
  }
};

PosteriorSummary summarize_proportions(const ProportionReplicates& replicates);

// Median componentwise ESS of the per-cell proportion chains.
double median_cell_ess(const ProportionReplicates& replicates);

}  // namespace mnstm
