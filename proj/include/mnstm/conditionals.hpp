#pragma once

#include <Eigen/Core>

#include "mnstm/model.hpp"
#include "mnstm/rng.hpp"

namespace mnstm {

// Stacked representation of a conjugate full conditional: the kernel is
//   alpha'(H q - mu) - kappa' log(1 + exp(H q - mu)).
// H is fixed across sweeps for a given model; mu and the shape vectors
// track the current state.
struct FullConditionalSpec {
  Eigen::MatrixXd h;
  Eigen::VectorXd mu;
  Eigen::VectorXd alpha;
  Eigen::VectorXd kappa;

  int target_len() const { return static_cast<int>(h.cols()); }
  int stacked_len() const { return static_cast<int>(h.rows()); }
  void validate() const;
  double logkernel(const Eigen::VectorXd& q) const;
};

// Regression block: likelihood rows over every active component, the
// replicated sigma*X rows, then the identity prior rows.
FullConditionalSpec build_beta_conditional(const MnStmModel& model,
                                           const ChainState& state);

// Random-effect block at time t (0-based). Interior times carry two extra
// feedback blocks from the t+1 transition.
FullConditionalSpec build_eta_conditional(const MnStmModel& model,
                                          const ChainState& state, int t);

// Fine-scale block at time t. Stacked identity blocks; rows with equal
// H entries and structurally zero locations are consolidated by summing
// their shapes, which leaves the kernel unchanged and removes needless
// augmentation (it is what makes degenerate conjugate cases exact).
FullConditionalSpec build_xi_conditional(const MnStmModel& model,
                                         const ChainState& state, int t);

// Draw via the stacked-independent-variable route: least squares applied
// to mu + w, with w independent logit-beta draws.
Eigen::VectorXd draw_from_conditional(const FullConditionalSpec& spec,
                                      Rng& rng);

}  // namespace mnstm
