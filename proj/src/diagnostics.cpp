#include "mnstm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mnstm {

namespace {

double quantile_sorted(std::vector<double>& v, double q) {
  if (v.empty()) return 0.0;
  const double pos = q * (static_cast<double>(v.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace

EssReport effective_sample_size(const Eigen::VectorXd& trace) {
  const int b = static_cast<int>(trace.size());
  if (b < 10) {
    throw std::invalid_argument("effective_sample_size: trace too short");
  }
  EssReport report;
  report.chain_length = b;
  report.variant = "autocorrelation-monotone";

  const double mean = trace.mean();
  Eigen::VectorXd centered = trace.array() - mean;
  const double var = centered.squaredNorm() / b;
  // constant up to rounding counts as degenerate
  if (var <= 1e-24 * (1.0 + mean * mean) || !std::isfinite(var)) {
    report.ess = b;
    report.degenerate = true;
    return report;
  }
  auto rho = [&](int lag) {
    double acc = 0.0;
    for (int i = 0; i + lag < b; ++i) acc += centered[i] * centered[i + lag];
    return acc / (b * var);
  };
  // Sum paired autocorrelations while positive, enforcing monotone decay.
  double tail = 0.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (int m = 0; 2 * m + 1 < b; ++m) {
    double pair = rho(2 * m) + rho(2 * m + 1);
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    tail += pair;
  }
  // tail includes rho_0 = 1 through the first pair
  const double tau = std::max(2.0 * tail - 1.0, 1.0);
  report.ess = b / tau;
  return report;
}

EssReport ess_within_between(const std::vector<Eigen::VectorXd>& chains) {
  if (chains.size() < 2) {
    throw std::invalid_argument("ess_within_between: need at least 2 chains");
  }
  EssReport report;
  report.variant = "within-between";
  const int c = static_cast<int>(chains.size());
  int b_total = 0;
  double within = 0.0;
  double grand = 0.0;
  std::vector<double> means(c);
  for (int j = 0; j < c; ++j) {
    const auto& ch = chains[j];
    if (ch.size() < 2) {
      throw std::invalid_argument("ess_within_between: chain too short");
    }
    b_total += static_cast<int>(ch.size());
    means[j] = ch.mean();
    grand += means[j];
    within += (ch.array() - means[j]).square().sum() / (ch.size() - 1.0);
  }
  within /= c;
  grand /= c;
  report.chain_length = b_total;
  const double b_len = chains.front().size();
  double between = 0.0;
  for (int j = 0; j < c; ++j) between += (means[j] - grand) * (means[j] - grand);
  between *= b_len / (c - 1.0);
  if (between <= 0.0) {
    report.ess = b_total;
    report.degenerate = true;
    return report;
  }
  report.ess = b_total * within / between;
  return report;
}

MraeReport median_relative_absolute_error(const std::vector<double>& truth,
                                          const std::vector<double>& totals,
                                          const std::vector<double>& estimate,
                                          int K, int N, int T) {
  const std::size_t cells = static_cast<std::size_t>(K) * N * T;
  if (truth.size() != cells || estimate.size() != cells ||
      totals.size() != static_cast<std::size_t>(N) * T) {
    throw std::invalid_argument("median_relative_absolute_error: size mismatch");
  }
  MraeReport report;
  report.errors.reserve(cells);
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < N; ++i) {
      for (int t = 0; t < T; ++t) {
        const std::size_t idx = static_cast<std::size_t>((k * N + i)) * T + t;
        const double m = totals[static_cast<std::size_t>(i) * T + t];
        const double pi = truth[idx];
        const double denom = m * pi * (1.0 - pi);
        if (!(denom > 0.0)) {
          ++report.excluded_zero_denominator;
          continue;
        }
        report.errors.push_back(std::abs(m * estimate[idx] - m * pi) / denom);
      }
    }
  }
  report.included = static_cast<int>(report.errors.size());
  if (report.errors.empty()) {
    throw std::invalid_argument(
        "median_relative_absolute_error: no usable cells");
  }
  std::vector<double> sorted = report.errors;
  std::sort(sorted.begin(), sorted.end());
  report.median = quantile_sorted(sorted, 0.5);
  return report;
}

double coverage_report(const ProportionReplicates& replicates,
                       const std::vector<double>& truth, double level) {
  if (replicates.B < 100) {
    throw std::invalid_argument("coverage_report: need at least 100 replicates");
  }
  if (!(level >= 0.0 && level <= 1.0)) {
    throw std::invalid_argument("coverage_report: level must lie in [0,1]");
  }
  const std::size_t cells =
      static_cast<std::size_t>(replicates.K) * replicates.N * replicates.T;
  if (truth.size() != cells) {
    throw std::invalid_argument("coverage_report: truth size mismatch");
  }
  const double tail = 0.5 * (1.0 - level);
  std::size_t covered = 0;
  for (int k = 0; k < replicates.K; ++k) {
    for (int i = 0; i < replicates.N; ++i) {
      for (int t = 0; t < replicates.T; ++t) {
        std::vector<double> series = replicates.cell_series(k, i, t);
        std::sort(series.begin(), series.end());
        const double lo = quantile_sorted(series, tail);
        const double hi = quantile_sorted(series, 1.0 - tail);
        const double target =
            truth[static_cast<std::size_t>((k * replicates.N + i)) *
                      replicates.T + t];
        if (target >= lo && target <= hi) ++covered;
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(cells);
}

PosteriorSummary summarize_proportions(const ProportionReplicates& replicates) {
  PosteriorSummary summary;
  summary.K = replicates.K;
  summary.N = replicates.N;
  summary.T = replicates.T;
  const std::size_t cells =
      static_cast<std::size_t>(replicates.K) * replicates.N * replicates.T;
  summary.mean.assign(cells, 0.0);
  summary.sd.assign(cells, 0.0);
  summary.q025.assign(cells, 0.0);
  summary.q975.assign(cells, 0.0);
  for (int k = 0; k < replicates.K; ++k) {
    for (int i = 0; i < replicates.N; ++i) {
      for (int t = 0; t < replicates.T; ++t) {
        std::vector<double> series = replicates.cell_series(k, i, t);
        double mean = 0.0;
        for (const double v : series) mean += v;
        mean /= series.size();
        double ss = 0.0;
        for (const double v : series) ss += (v - mean) * (v - mean);
        const double sd =
            series.size() > 1 ? std::sqrt(ss / (series.size() - 1.0)) : 0.0;
        std::sort(series.begin(), series.end());
        const std::size_t idx = summary.cell(k, i, t);
        summary.mean[idx] = mean;
        summary.sd[idx] = sd;
        summary.q025[idx] = quantile_sorted(series, 0.025);
        summary.q975[idx] = quantile_sorted(series, 0.975);
      }
    }
  }
  return summary;
}

double median_cell_ess(const ProportionReplicates& replicates) {
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(replicates.K) * replicates.N *
                 replicates.T);
  for (int k = 0; k < replicates.K; ++k) {
    for (int i = 0; i < replicates.N; ++i) {
      for (int t = 0; t < replicates.T; ++t) {
        const std::vector<double> series = replicates.cell_series(k, i, t);
        Eigen::VectorXd trace =
            Eigen::Map<const Eigen::VectorXd>(series.data(), series.size());
        values.push_back(effective_sample_size(trace).ess);
      }
    }
  }
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, 0.5);
}

}  // namespace mnstm
