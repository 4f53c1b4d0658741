#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "mnstm/moran.hpp"
#include "mnstm/panel.hpp"

namespace mnstm {

enum class SimVariant {
  kStaticLmlb,      // single-time latent logistic design with a known basis
  kEmpiricalMnstm,  // smoothed-count surrogate with a partial observation mask
};

struct SimDesign {
  SimVariant variant = SimVariant::kStaticLmlb;
  int n_units = 50;
  int k_categories = 5;
  int t_points = 1;
  int rank = 125;
  double observed_fraction = 1.0;  // (0, 1]
  std::int64_t cell_total = 100;   // multinomial size scale per cell

  void validate() const;
};

struct SimulatedData {
  CountPanel panel;
  std::vector<double> truth;  // pi over (k*N + i)*T + t
  std::vector<Eigen::MatrixXd> x_pred;  // per time, (K-1)N x p
  Eigen::MatrixXd phi_pred;             // static design basis (empty otherwise)
  Adjacency unit_adj;                   // empirical design graph (empty otherwise)
};

// Static design: two smooth covariates orthonormalized, basis from the
// orthogonal complement, Gaussian latent effects, counts from the implied
// multinomial. Empirical design: smooth synthetic base counts, truth
// probabilities (y+1)/(m+K), a grid adjacency, indicator covariates and a
// random observation mask.
SimulatedData simulate_panel(const SimDesign& design, std::uint64_t seed);

// Intercept, category indicators and per-time indicators, re-dimensioned
// to the panel; the per-slice rank deficiency is handled downstream.
std::vector<Eigen::MatrixXd> indicator_covariates(int K, int N, int T);

// Orthonormalized two-column static design and the leading null-space
// basis columns. Deterministic in the dimensions, so a fit can rebuild
// exactly what the simulator used.
void static_design_matrices(int K, int N, int rank, Eigen::MatrixXd& x,
                            Eigen::MatrixXd& phi);

// 4-neighbor grid over n units (rows of width ceil(sqrt(n))).
Adjacency grid_adjacency(int n_units);

}  // namespace mnstm
