#pragma once

// Test-only oracles: quadrature, convolution-based distribution of linear
// combinations of logit-beta variables, KS distance, and small sampling
// helpers. Kept independent of the sampling routes they check.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "mnstm/logit_beta.hpp"
#include "mnstm/special_functions.hpp"

namespace testutil {

// Composite Simpson rule on [a, b].
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n_panels = 2000) {
  const double h = (b - a) / (2 * n_panels);
  double acc = f(a) + f(b);
  for (int i = 1; i < 2 * n_panels; ++i) {
    acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

// CDF of sum_i w_i * (mu_i + LB(alpha_i, kappa_i)) on a dense grid, by
// direct numerical convolution of the scaled component densities.
struct LinearComboCdf {
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

inline LinearComboCdf logit_beta_combo_cdf(const Eigen::VectorXd& weights,
                                           const Eigen::VectorXd& mu,
                                           const Eigen::VectorXd& alpha,
                                           const Eigen::VectorXd& kappa,
                                           int n_grid = 4001) {
  if (n_grid % 2 == 0) ++n_grid;
  const int m = static_cast<int>(weights.size());
  double shift = 0.0;
  double spread = 0.0;
  std::vector<int> used;
  for (int i = 0; i < m; ++i) {
    if (std::abs(weights[i]) < 1e-14) continue;
    const mnstm::LogitBetaParams lb{alpha[i], kappa[i]};
    shift += weights[i] * (mu[i] + mnstm::logit_beta_mean(lb));
    spread += weights[i] * weights[i] * mnstm::logit_beta_variance(lb);
    used.push_back(i);
  }
  const double half = 14.0 * std::sqrt(spread) + 1.0;
  const double step = 2.0 * half / (n_grid - 1);
  const int n0 = (n_grid - 1) / 2;
  auto density = [&](int i) {
    std::vector<double> f(n_grid, 0.0);
    const mnstm::LogitBetaParams lb{alpha[i], kappa[i]};
    const double a = weights[i];
    const double mean_i = mnstm::logit_beta_mean(lb);
    for (int g = 0; g < n_grid; ++g) {
      const double z = (g - n0) * step;
      f[g] = std::exp(mnstm::logit_beta_logpdf(z / a + mean_i, lb)) / std::abs(a);
    }
    return f;
  };
  std::vector<double> acc = density(used.front());
  for (std::size_t u = 1; u < used.size(); ++u) {
    const std::vector<double> f = density(used[u]);
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
  LinearComboCdf out;
  out.grid.resize(n_grid);
  out.cdf.resize(n_grid);
  out.grid[0] = -half + shift;
  out.cdf[0] = 0.0;
  double total = 0.0;
  for (int g = 1; g < n_grid; ++g) {
    out.grid[g] = (g - n0) * step + shift;
    total += 0.5 * (acc[g - 1] + acc[g]) * step;
    out.cdf[g] = total;
  }
  for (double& c : out.cdf) c /= total;
  return out;
}

inline double ks_distance(std::vector<double> draws,
                          const LinearComboCdf& oracle) {
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

inline double sample_mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (const double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double acc = 0.0;
  for (const double x : v) acc += (x - m) * (x - m);
  return acc / (static_cast<double>(v.size()) - 1.0);
}

// Reference orthonormal random matrix via std::mt19937 + Gram-Schmidt;
// independent of the library RNG.
inline Eigen::MatrixXd random_orthonormal(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = normal(gen);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace testutil
