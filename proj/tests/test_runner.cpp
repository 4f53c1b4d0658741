#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mnstm/io.hpp"
#include "mnstm/runner.hpp"

using namespace mnstm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mnstm_runner_test_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("invalid configuration exits with the user code and no outputs") {
  TempDir dir;
  RunConfig config;
  config.output_dir = dir.file("out");
  std::ostringstream log;
  CHECK(run(config, log) == 1);  // no counts path
  CHECK_FALSE(fs::exists(fs::path(config.output_dir) / "posterior_summary.csv"));
  config.counts_path = dir.file("missing.csv");
  CHECK(run(config, log) == 1);
  CHECK_FALSE(fs::exists(fs::path(config.output_dir) / "posterior_summary.csv"));
}

TEST_CASE("simulate then fit covers the full prediction grid") {
  TempDir dir;
  std::ostringstream log;
  RunConfig sim;
  sim.simulate_only = true;
  sim.design.variant = SimVariant::kEmpiricalMnstm;
  sim.design.n_units = 10;
  sim.design.k_categories = 3;
  sim.design.t_points = 3;
  sim.design.rank = 3;
  sim.design.observed_fraction = 0.7;
  sim.design.cell_total = 50;
  sim.chain.seed = 12;
  sim.output_dir = dir.file("sim");
  REQUIRE(run(sim, log) == 0);
  CHECK(fs::exists(fs::path(sim.output_dir) / "totals.csv"));

  RunConfig fit;
  fit.counts_path = (fs::path(sim.output_dir) / "counts.csv").string();
  fit.adjacency_path = (fs::path(sim.output_dir) / "adjacency.txt").string();
  fit.truth_path = (fs::path(sim.output_dir) / "truth.csv").string();
  fit.totals_path = (fs::path(sim.output_dir) / "totals.csv").string();
  fit.model = "mnstm";
  fit.rank = 3;
  fit.chain.iterations = 120;
  fit.chain.seed = 4;
  fit.output_dir = dir.file("fit");
  REQUIRE(run(fit, log) == 0);

  const PosteriorSummary summary = load_posterior_summary(
      (fs::path(fit.output_dir) / "posterior_summary.csv").string());
  CHECK(summary.K == 3);
  CHECK(summary.N == 10);
  CHECK(summary.T == 3);
  CHECK(summary.mean.size() == 3u * 10u * 3u);
  CHECK(fs::exists(fs::path(fit.output_dir) / "diagnostics.json"));
  CHECK(fs::exists(fs::path(fit.output_dir) / "trace.csv"));
  CHECK(fs::exists(fs::path(fit.output_dir) / "manifest.json"));
}

TEST_CASE("config files round-trip through the manifest") {
  TempDir dir;
  std::ostringstream log;
  RunConfig sim;
  sim.simulate_only = true;
  sim.design.variant = SimVariant::kStaticLmlb;
  sim.design.n_units = 12;
  sim.design.k_categories = 3;
  sim.design.rank = 8;
  sim.design.cell_total = 40;
  sim.chain.seed = 31;
  sim.output_dir = dir.file("sim");
  REQUIRE(run(sim, log) == 0);
  const RunConfig loaded =
      load_run_config((fs::path(sim.output_dir) / "manifest.json").string());
  CHECK(loaded.design.n_units == 12);
  CHECK(loaded.design.rank == 8);
  CHECK(loaded.chain.seed == 31);
  CHECK(loaded.simulate_only);
}
