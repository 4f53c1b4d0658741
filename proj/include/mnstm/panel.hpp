#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace mnstm {

// Multinomial counts over categories x areal units x time, with an
// observation mask over (unit, time) pairs. Cell totals m_it and the
// remaining-trial counts of the stick-breaking factorization are derived
// from the stored counts.
struct CountPanel {
  int K = 0;
  int N = 0;
  int T = 0;
  std::vector<std::int64_t> counts;  // K * N * T, k fastest
  std::vector<char> observed;        // N * T mask over (i, t)

  static CountPanel zeros(int k, int n, int t);

  std::int64_t& y(int k, int i, int t) {
    return counts[static_cast<std::size_t>((t * N + i) * K + k)];
  }
  std::int64_t y(int k, int i, int t) const {
    return counts[static_cast<std::size_t>((t * N + i) * K + k)];
  }
  bool is_observed(int i, int t) const {
    return observed[static_cast<std::size_t>(t * N + i)] != 0;
  }
  void set_observed(int i, int t, bool value) {
    observed[static_cast<std::size_t>(t * N + i)] = value ? 1 : 0;
  }

  // m_it
  std::int64_t total(int i, int t) const;
  // n_kit = m_it - sum_{j<k} y_jit, the trial count of stick k
  std::int64_t stick_trials(int k, int i, int t) const;
  // N_t
  int observed_units(int t) const;
  // (K-1) * sum_t N_t
  std::int64_t component_count() const;

  void validate() const;
};

// Conditional stick probabilities p_k = pi_k / (1 - sum_{j<k} pi_j),
// k = 1..K-1, from a point on the K-simplex.
Eigen::VectorXd stick_break_forward(const Eigen::VectorXd& pi);

// Inverse cascade: pi_1 = p_1, pi_k = (1 - sum_{j<k} pi_j) p_k, and the
// last category takes the remainder. Output sums to one.
Eigen::VectorXd stick_break_inverse(const Eigen::VectorXd& p);

// Multinomial log pmf computed through the K-1 binomial factors with
// logits nu; equals the direct multinomial formula exactly.
double multinomial_logpmf_factored(const std::vector<std::int64_t>& y,
                                   std::int64_t m, const Eigen::VectorXd& nu);

}  // namespace mnstm
