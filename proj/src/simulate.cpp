#include "mnstm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mnstm/mlb.hpp"
#include "mnstm/model.hpp"
#include "mnstm/rng.hpp"
#include "mnstm/special_functions.hpp"

namespace mnstm {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::int64_t draw_binomial(std::int64_t n, double p, Rng& rng) {
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    if (rng.uniform() < p) ++hits;
  }
  return hits;
}

void fill_multinomial(CountPanel& panel, const std::vector<double>& pi,
                      const std::vector<std::int64_t>& totals, Rng& rng) {
  for (int t = 0; t < panel.T; ++t) {
    for (int i = 0; i < panel.N; ++i) {
      std::int64_t remaining_n = totals[static_cast<std::size_t>(i) * panel.T + t];
      double remaining_p = 1.0;
      for (int k = 0; k < panel.K - 1; ++k) {
        const double pk =
            pi[static_cast<std::size_t>((k * panel.N + i)) * panel.T + t];
        const double cond = std::min(std::max(pk / remaining_p, 0.0), 1.0);
        const std::int64_t draw = draw_binomial(remaining_n, cond, rng);
        panel.y(k, i, t) = draw;
        remaining_n -= draw;
        remaining_p -= pk;
      }
      panel.y(panel.K - 1, i, t) = remaining_n;
    }
  }
}

SimulatedData simulate_static(const SimDesign& design, std::uint64_t seed) {
  const int n_units = design.n_units;
  const int k_cat = design.k_categories;
  const int rows = (k_cat - 1) * n_units;
  if (design.rank > rows - 2) {
    throw std::invalid_argument("simulate_panel: rank too large for the design");
  }
  Rng rng(seed);

  Eigen::MatrixXd x;
  Eigen::MatrixXd phi;
  static_design_matrices(k_cat, n_units, design.rank, x, phi);

  Eigen::VectorXd beta(2);
  beta << 0.01, -2.0;
  Eigen::VectorXd eta(design.rank);
  for (int j = 0; j < design.rank; ++j) eta[j] = rng.normal();
  Eigen::VectorXd xi(rows);
  const double xi_sd = std::sqrt(0.33);
  for (int j = 0; j < rows; ++j) xi[j] = xi_sd * rng.normal();

  const Eigen::VectorXd nu = x * beta + phi * eta + xi;

  SimulatedData out;
  out.panel = CountPanel::zeros(k_cat, n_units, 1);
  out.truth.assign(static_cast<std::size_t>(k_cat) * n_units, 0.0);
  std::vector<std::int64_t> totals(n_units, design.cell_total);
  for (int i = 0; i < n_units; ++i) {
    double remaining = 1.0;
    for (int k = 0; k < k_cat - 1; ++k) {
      const double pi_k = remaining * sigmoid(nu[pred_row(k, i, n_units)]);
      out.truth[static_cast<std::size_t>(k * n_units + i)] = pi_k;
      remaining -= pi_k;
    }
    out.truth[static_cast<std::size_t>((k_cat - 1) * n_units + i)] = remaining;
  }
  fill_multinomial(out.panel, out.truth, totals, rng);
  out.x_pred.push_back(x);
  out.phi_pred = phi;
  return out;
}

SimulatedData simulate_empirical(const SimDesign& design, std::uint64_t seed) {
  const int n_units = design.n_units;
  const int k_cat = design.k_categories;
  const int t_points = design.t_points;
  Rng rng(seed);

  SimulatedData out;
  out.unit_adj = grid_adjacency(n_units);
  out.x_pred = indicator_covariates(k_cat, n_units, t_points);

  const int width = static_cast<int>(std::ceil(std::sqrt(n_units)));
  // Smooth base surface: category level, gentle spatial gradients and a
  // seasonal swing per category.
  std::vector<double> level(k_cat - 1), gx(k_cat - 1), gy(k_cat - 1),
      amp(k_cat - 1), phase(k_cat - 1);
  for (int k = 0; k < k_cat - 1; ++k) {
    level[k] = -0.4 - 0.5 * k + 0.2 * rng.normal();
    gx[k] = 1.2 + 0.3 * rng.normal();
    gy[k] = -0.8 + 0.3 * rng.normal();
    amp[k] = 0.5 + 0.15 * rng.normal();
    phase[k] = 2.0 * kPi * rng.uniform();
  }

  std::vector<std::int64_t> totals(static_cast<std::size_t>(n_units) * t_points);
  for (int i = 0; i < n_units; ++i) {
    for (int t = 0; t < t_points; ++t) {
      totals[static_cast<std::size_t>(i) * t_points + t] =
          1 + static_cast<std::int64_t>(design.cell_total * (0.5 + rng.uniform()));
    }
  }

  // Base counts act as the pseudo-population the truth is smoothed from.
  CountPanel base = CountPanel::zeros(k_cat, n_units, t_points);
  std::vector<double> base_pi(static_cast<std::size_t>(k_cat) * n_units * t_points);
  for (int i = 0; i < n_units; ++i) {
    const double u1 = (i % width) / std::max(1.0, width - 1.0) - 0.5;
    const double u2 = (i / width) / std::max(1.0, width - 1.0) - 0.5;
    for (int t = 0; t < t_points; ++t) {
      double remaining = 1.0;
      for (int k = 0; k < k_cat - 1; ++k) {
        const double nu = level[k] + gx[k] * u1 + gy[k] * u2 +
                          amp[k] * std::sin(2.0 * kPi * t / t_points + phase[k]) +
                          0.1 * rng.normal();
        const double pi_k = remaining * sigmoid(nu);
        base_pi[static_cast<std::size_t>((k * n_units + i)) * t_points + t] = pi_k;
        remaining -= pi_k;
      }
      base_pi[static_cast<std::size_t>(((k_cat - 1) * n_units + i)) * t_points +
              t] = remaining;
    }
  }
  fill_multinomial(base, base_pi, totals, rng);

  // Truth via the add-one smoothing map (y + 1) / (m + K): strictly inside
  // the simplex and summing to one by construction.
  out.truth.assign(static_cast<std::size_t>(k_cat) * n_units * t_points, 0.0);
  for (int k = 0; k < k_cat; ++k) {
    for (int i = 0; i < n_units; ++i) {
      for (int t = 0; t < t_points; ++t) {
        const double m =
            static_cast<double>(totals[static_cast<std::size_t>(i) * t_points + t]);
        out.truth[static_cast<std::size_t>((k * n_units + i)) * t_points + t] =
            (static_cast<double>(base.y(k, i, t)) + 1.0) / (m + k_cat);
      }
    }
  }

  out.panel = CountPanel::zeros(k_cat, n_units, t_points);
  fill_multinomial(out.panel, out.truth, totals, rng);

  // Random observation mask over (unit, time).
  const std::size_t cells = static_cast<std::size_t>(n_units) * t_points;
  const int keep = std::max<int>(1, static_cast<int>(
      std::lround(design.observed_fraction * static_cast<double>(cells))));
  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t j = cells - 1; j > 0; --j) {
    const std::size_t pick =
        static_cast<std::size_t>(rng.uniform() * static_cast<double>(j + 1));
    std::swap(order[j], order[std::min(pick, j)]);
  }
  std::fill(out.panel.observed.begin(), out.panel.observed.end(), 0);
  for (int j = 0; j < keep; ++j) {
    out.panel.observed[order[j]] = 1;
  }
  return out;
}

}  // namespace

void SimDesign::validate() const {
  if (n_units < 2 || k_categories < 2 || t_points < 1 || rank < 1) {
    throw std::invalid_argument("SimDesign: bad dimensions");
  }
  if (!(observed_fraction > 0.0 && observed_fraction <= 1.0)) {
    throw std::invalid_argument("SimDesign: observed_fraction must be in (0,1]");
  }
  if (cell_total < 1) {
    throw std::invalid_argument("SimDesign: cell_total must be >= 1");
  }
  if (variant == SimVariant::kStaticLmlb && t_points != 1) {
    throw std::invalid_argument("SimDesign: the static design is single-time");
  }
}

SimulatedData simulate_panel(const SimDesign& design, std::uint64_t seed) {
  design.validate();
  return design.variant == SimVariant::kStaticLmlb
             ? simulate_static(design, seed)
             : simulate_empirical(design, seed);
}

void static_design_matrices(int K, int N, int rank, Eigen::MatrixXd& x,
                            Eigen::MatrixXd& phi) {
  const int rows = (K - 1) * N;
  // Smooth two-column design; the sine argument is scaled into (0, pi] so
  // the second column is not identically zero.
  Eigen::MatrixXd g(rows, 2);
  for (int k = 1; k <= K - 1; ++k) {
    for (int i = 1; i <= N; ++i) {
      const int row = pred_row(k - 1, i - 1, N);
      g(row, 0) = 1.0;
      g(row, 1) =
          std::sin(kPi * (static_cast<double>(k) * i + (k - 1.0) * N) /
                   static_cast<double>(rows));
    }
  }
  x = orth_basis(g);
  phi = null_space_basis(x).leftCols(rank);
}

std::vector<Eigen::MatrixXd> indicator_covariates(int K, int N, int T) {
  const int rows = (K - 1) * N;
  const int p = 1 + std::max(0, K - 2) + std::max(0, T - 1);
  std::vector<Eigen::MatrixXd> x(T, Eigen::MatrixXd::Zero(rows, p));
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < K - 1; ++k) {
      for (int i = 0; i < N; ++i) {
        const int row = pred_row(k, i, N);
        x[t](row, 0) = 1.0;
        if (k < K - 2) x[t](row, 1 + k) = 1.0;
        if (t >= 1) x[t](row, 1 + std::max(0, K - 2) + (t - 1)) = 1.0;
      }
    }
  }
  return x;
}

Adjacency grid_adjacency(int n_units) {
  if (n_units < 2) {
    throw std::invalid_argument("grid_adjacency: need at least 2 units");
  }
  const int width = static_cast<int>(std::ceil(std::sqrt(n_units)));
  Adjacency adj;
  adj.edges = Eigen::MatrixXd::Zero(n_units, n_units);
  for (int i = 0; i < n_units; ++i) {
    const int cx = i % width;
    if (cx + 1 < width && i + 1 < n_units) {
      adj.edges(i, i + 1) = 1.0;
      adj.edges(i + 1, i) = 1.0;
    }
    if (i + width < n_units) {
      adj.edges(i, i + width) = 1.0;
      adj.edges(i + width, i) = 1.0;
    }
  }
  adj.validate();
  return adj;
}

}  // namespace mnstm
