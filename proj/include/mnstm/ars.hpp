#pragma once

#include <functional>
#include <string>

#include "mnstm/rng.hpp"

namespace mnstm {

struct ArsOptions {
  int max_rejections = 500;
  double concavity_tol = 1e-8;
};

// Exact draw from an unnormalized log-concave density on the open interval
// (lower, upper); either bound may be infinite. Derivative-free envelope
// built from secants, refined at every rejected evaluation. Throws when the
// evaluations contradict concavity, naming the offending kernel.
double sample_log_concave(const std::function<double(double)>& log_density,
                          double lower, double upper, Rng& rng,
                          const std::string& label = {},
                          const ArsOptions& options = {});

}  // namespace mnstm
