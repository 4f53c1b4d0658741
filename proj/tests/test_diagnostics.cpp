#include <doctest.h>

#include <cmath>

#include "mnstm/diagnostics.hpp"
#include "mnstm/rng.hpp"
#include "test_util.hpp"

using namespace mnstm;

TEST_CASE("independent draws give ess near the chain length") {
  Rng rng(1);
  const int b = 10000;
  Eigen::VectorXd trace(b);
  for (int i = 0; i < b; ++i) trace[i] = rng.normal();
  const EssReport report = effective_sample_size(trace);
  CHECK(report.ess > 0.8 * b);
  CHECK(report.ess < 1.2 * b);
  CHECK_FALSE(report.degenerate);
}

TEST_CASE("ar(1) autocorrelation matches the analytic factor") {
  Rng rng(2);
  const int b = 40000;
  const double phi = 0.9;
  Eigen::VectorXd trace(b);
  double x = 0.0;
  for (int i = 0; i < b; ++i) {
    x = phi * x + rng.normal();
    trace[i] = x;
  }
  const EssReport report = effective_sample_size(trace);
  // integrated autocorrelation (1+phi)/(1-phi) = 19
  const double expected = b * (1.0 - phi) / (1.0 + phi);
  CHECK(std::abs(report.ess - expected) / expected < 0.3);
}

TEST_CASE("constant trace reports the length with a flag") {
  const Eigen::VectorXd trace = Eigen::VectorXd::Constant(500, 3.2);
  const EssReport report = effective_sample_size(trace);
  CHECK(report.ess == 500);
  CHECK(report.degenerate);
}

TEST_CASE("ess is invariant to affine maps of the trace") {
  Rng rng(3);
  const int b = 5000;
  Eigen::VectorXd trace(b);
  double x = 0.0;
  for (int i = 0; i < b; ++i) {
    x = 0.6 * x + rng.normal();
    trace[i] = x;
  }
  const double base = effective_sample_size(trace).ess;
  const Eigen::VectorXd shifted = 5.0 * trace.array() - 11.0;
  CHECK(effective_sample_size(shifted).ess ==
        doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("within-between variant on parallel chains") {
  Rng rng(4);
  std::vector<Eigen::VectorXd> chains;
  for (int c = 0; c < 4; ++c) {
    Eigen::VectorXd trace(2000);
    for (int i = 0; i < 2000; ++i) trace[i] = rng.normal();
    chains.push_back(trace);
  }
  const EssReport report = ess_within_between(chains);
  CHECK(report.variant == "within-between");
  CHECK(report.ess > 0.0);
  CHECK(report.chain_length == 8000);
  CHECK_THROWS_AS(ess_within_between({chains[0]}), std::invalid_argument);
}

TEST_CASE("exact estimates give zero error") {
  const int k = 2, n = 3, t = 2;
  std::vector<double> truth(k * n * t, 0.3);
  for (std::size_t i = k * n; i < truth.size(); ++i) truth[i] = 0.7;
  std::vector<double> totals(n * t, 50.0);
  const MraeReport report =
      median_relative_absolute_error(truth, totals, truth, k, n, t);
  CHECK(report.median == 0.0);
  CHECK(report.included == k * n * t);
}

TEST_CASE("uniform shift has the closed-form cell error") {
  const int k = 1, n = 4, t = 1;
  const double pi = 0.4;
  const double m = 25.0;
  std::vector<double> truth(k * n * t, pi);
  std::vector<double> totals(n * t, m);
  std::vector<double> estimate(k * n * t, pi + 1.0 / m);
  const MraeReport report =
      median_relative_absolute_error(truth, totals, estimate, k, n, t);
  CHECK(report.median == doctest::Approx(1.0 / (m * pi * (1.0 - pi))));
}

TEST_CASE("zero denominators are excluded and counted") {
  const int k = 2, n = 2, t = 1;
  std::vector<double> truth{0.5, 0.5, 1.0, 0.0};  // (k*N+i) * T layout
  std::vector<double> totals{10.0, 10.0};
  std::vector<double> estimate{0.4, 0.6, 1.0, 0.0};
  const MraeReport report =
      median_relative_absolute_error(truth, totals, estimate, k, n, t);
  CHECK(report.excluded_zero_denominator == 2);
  CHECK(report.included == 2);
}

TEST_CASE("median is invariant to cell permutation") {
  Rng rng(5);
  const int k = 2, n = 5, t = 3;
  std::vector<double> truth(k * n * t), estimate(k * n * t);
  std::vector<double> totals(n * t);
  for (auto& v : truth) v = 0.2 + 0.6 * rng.uniform();
  for (std::size_t c = 0; c < estimate.size(); ++c) {
    estimate[c] = truth[c] + 0.05 * rng.normal();
  }
  for (auto& v : totals) v = 20.0 + 30.0 * rng.uniform();
  const double base =
      median_relative_absolute_error(truth, totals, estimate, k, n, t).median;
  // permuting categories permutes cells but not the median
  std::vector<double> truth_p(truth.size()), estimate_p(estimate.size());
  for (int kk = 0; kk < k; ++kk) {
    for (int ii = 0; ii < n; ++ii) {
      for (int tt = 0; tt < t; ++tt) {
        const std::size_t src = static_cast<std::size_t>((kk * n + ii)) * t + tt;
        const std::size_t dst =
            static_cast<std::size_t>((((k - 1 - kk) * n + ii)) * t) + tt;
        truth_p[dst] = truth[src];
        estimate_p[dst] = estimate[src];
      }
    }
  }
  const double permuted =
      median_relative_absolute_error(truth_p, totals, estimate_p, k, n, t)
          .median;
  CHECK(permuted == doctest::Approx(base).epsilon(1e-14));
}

namespace {

ProportionReplicates synthetic_reps(const std::vector<double>& center,
                                    double sd, int b, int k, int n, int t,
                                    unsigned seed) {
  ProportionReplicates reps;
  reps.K = k;
  reps.N = n;
  reps.T = t;
  reps.B = b;
  reps.values.resize(static_cast<std::size_t>(b) * k * n * t);
  Rng rng(seed);
  for (int bb = 0; bb < b; ++bb) {
    for (int kk = 0; kk < k; ++kk) {
      for (int ii = 0; ii < n; ++ii) {
        for (int tt = 0; tt < t; ++tt) {
          const std::size_t cell = static_cast<std::size_t>((kk * n + ii)) * t + tt;
          reps.values[static_cast<std::size_t>(((bb * k + kk) * n + ii)) * t +
                      tt] = center[cell] + sd * rng.normal();
        }
      }
    }
  }
  return reps;
}

}  // namespace

TEST_CASE("coverage behaviour") {
  const int k = 1, n = 20, t = 10;
  std::vector<double> truth(k * n * t);
  Rng rng(6);
  for (auto& v : truth) v = 0.3 + 0.4 * rng.uniform();
  // replicates centered on the truth: nominal-level coverage
  const ProportionReplicates reps = synthetic_reps(truth, 0.02, 600, k, n, t, 7);
  const double cov95 = coverage_report(reps, truth, 0.95);
  CHECK(cov95 > 0.90);
  CHECK(cov95 <= 1.0);
  // intervals at level ~0 nearly never cover
  const double cov0 = coverage_report(reps, truth, 0.001);
  CHECK(cov0 < 0.1);
  // monotone in the level
  const double cov50 = coverage_report(reps, truth, 0.5);
  CHECK(cov50 <= cov95 + 1e-12);
  CHECK(cov0 <= cov50 + 1e-12);
  // biased replicates with wide intervals still cover
  std::vector<double> shifted = truth;
  const ProportionReplicates wide = synthetic_reps(shifted, 0.3, 600, k, n, t, 8);
  CHECK(coverage_report(wide, truth, 0.95) > 0.9);
}

TEST_CASE("summaries have ordered quantiles") {
  std::vector<double> center(6, 0.4);
  const ProportionReplicates reps = synthetic_reps(center, 0.05, 300, 2, 3, 1, 9);
  const PosteriorSummary summary = summarize_proportions(reps);
  for (std::size_t c = 0; c < summary.mean.size(); ++c) {
    CHECK(summary.q025[c] <= summary.mean[c] + 1e-12);
    CHECK(summary.mean[c] <= summary.q975[c] + 1e-12);
    CHECK(summary.sd[c] > 0.0);
  }
}
