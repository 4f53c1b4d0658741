#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "mnstm/model.hpp"
#include "mnstm/sampler.hpp"
#include "mnstm/simulate.hpp"

namespace mnstm {

struct RunConfig {
  // inputs
  std::string counts_path;
  std::string adjacency_path;
  std::string covariates_path;  // optional, indicator covariates otherwise
  std::string truth_path;       // optional, enables error diagnostics
  std::string totals_path;      // optional, full-grid totals for the metrics
  std::string output_dir = ".";

  // model
  std::string model = "mnstm";  // "mnstm" or "lmlb"
  int rank = 10;
  MnStmSpec model_spec;
  ChainConfig chain;

  // simulate mode
  bool simulate_only = false;
  SimDesign design;
};

RunConfig load_run_config(const std::string& path);

// Exit codes: 0 success, 1 user/configuration error, 2 numerical failure.
// Writes posterior_summary.csv, diagnostics.json, trace.csv and
// manifest.json into output_dir (or the simulated inputs in simulate mode).
int run(const RunConfig& config, std::ostream& log);

// Distribution-level check batteries (sampling identity, stability,
// precision solver, mixture identity, conjugacy). Prints one line per
// check; returns 0 when all pass, 2 otherwise.
int validate_properties(std::ostream& out, bool quick = true);

}  // namespace mnstm
