#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mnstm/diagnostics.hpp"
#include "mnstm/io.hpp"
#include "mnstm/logit_beta.hpp"
#include "mnstm/mlb.hpp"
#include "mnstm/moran.hpp"
#include "mnstm/panel.hpp"
#include "mnstm/polya_gamma.hpp"
#include "mnstm/runner.hpp"
#include "mnstm/special_functions.hpp"

namespace py = pybind11;

namespace {

mnstm::Adjacency adjacency_from(const Eigen::MatrixXd& edges) {
  mnstm::Adjacency adj;
  adj.edges = edges;
  adj.validate();
  return adj;
}

}  // namespace

PYBIND11_MODULE(mnstm, m) {
  m.doc() = "Multinomial spatio-temporal mixed-effects model: logit-beta "
            "distribution family, Moran basis construction, collapsed Gibbs "
            "sampler and chain diagnostics.";

  m.def("digamma", &mnstm::digamma, py::arg("x"));
  m.def("trigamma", &mnstm::trigamma, py::arg("x"));
  m.def("log1p_exp", &mnstm::log1p_exp, py::arg("x"));

  m.def(
      "logit_beta_sample",
      [](double alpha, double kappa, int n, std::uint64_t seed) {
        return mnstm::logit_beta_sample({alpha, kappa}, n, seed);
      },
      py::arg("alpha"), py::arg("kappa"), py::arg("n"), py::arg("seed"));
  m.def(
      "logit_beta_logpdf",
      [](double q, double alpha, double kappa) {
        return mnstm::logit_beta_logpdf(q, {alpha, kappa});
      },
      py::arg("q"), py::arg("alpha"), py::arg("kappa"));

  m.def(
      "mlb_logpdf",
      [](const Eigen::VectorXd& q, const Eigen::VectorXd& mu,
         const Eigen::MatrixXd& v, const Eigen::VectorXd& alpha,
         const Eigen::VectorXd& kappa) {
        return mnstm::mlb_logpdf(q, {mu, v, alpha, kappa});
      },
      py::arg("q"), py::arg("mu"), py::arg("precision_factor"),
      py::arg("alpha"), py::arg("kappa"));
  m.def("conditional_mlb_logkernel", &mnstm::conditional_mlb_logkernel,
        py::arg("q1"), py::arg("c"), py::arg("h"), py::arg("alpha"),
        py::arg("kappa"));
  m.def("null_space_basis", &mnstm::null_space_basis, py::arg("h"));
  m.def("marginal_mlb_sample", &mnstm::marginal_mlb_sample, py::arg("h_star"),
        py::arg("mu_star"), py::arg("alpha_star"), py::arg("kappa_star"),
        py::arg("n"), py::arg("seed"));

  m.def(
      "polya_gamma_sample",
      [](double b, int n, std::uint64_t seed, int truncation) {
        return mnstm::polya_gamma_sample({b, truncation}, n, seed);
      },
      py::arg("b"), py::arg("n"), py::arg("seed"), py::arg("truncation") = 200);
  m.def("verify_pg_identity", &mnstm::verify_pg_identity, py::arg("a"),
        py::arg("b"), py::arg("h"), py::arg("n_mc"), py::arg("seed"),
        py::arg("truncation") = 200);

  m.def(
      "moran_operator",
      [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& edges) {
        return mnstm::moran_operator(x, adjacency_from(edges));
      },
      py::arg("x"), py::arg("adjacency"));
  m.def(
      "mi_basis",
      [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& edges, int r) {
        return mnstm::mi_basis(x, adjacency_from(edges), r);
      },
      py::arg("x"), py::arg("adjacency"), py::arg("r"));
  m.def(
      "mi_energy_fraction",
      [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& edges, int r) {
        return mnstm::mi_energy_fraction(x, adjacency_from(edges), r);
      },
      py::arg("x"), py::arg("adjacency"), py::arg("r"));
  m.def("mi_propagator",
        [](const Eigen::MatrixXd& phi, const Eigen::MatrixXd& x,
           const Eigen::MatrixXd& u) {
          return mnstm::mi_propagator(phi, x, u);
        },
        py::arg("phi_pred"), py::arg("x_pred"), py::arg("u_weight"));
  m.def(
      "stability_analysis",
      [](const std::vector<Eigen::MatrixXd>& psi, double rho, int horizon) {
        const mnstm::StabilityReport report =
            mnstm::stability_analysis(psi, rho, horizon);
        py::dict out;
        out["rho"] = report.rho;
        out["partial_sums"] = report.partial_sums;
        out["limit"] = report.limit;
        out["converged"] = report.converged;
        return out;
      },
      py::arg("psi_seq"), py::arg("rho"), py::arg("horizon"));
  m.def("positive_approximant", &mnstm::positive_approximant, py::arg("c"));
  m.def(
      "solve_precision_factor",
      [](const Eigen::MatrixXd& phi_pred, const Eigen::MatrixXd& phi_obs,
         const Eigen::MatrixXd& p_target, double alpha, double kappa) {
        const mnstm::PrecisionSolve solve = mnstm::solve_precision_factor(
            phi_pred, phi_obs, p_target, alpha, kappa);
        return py::make_tuple(solve.v, solve.sigma_eta_sq);
      },
      py::arg("phi_pred"), py::arg("phi_obs"), py::arg("p_target"),
      py::arg("alpha"), py::arg("kappa"));

  m.def("stick_break_forward", &mnstm::stick_break_forward, py::arg("pi"));
  m.def("stick_break_inverse", &mnstm::stick_break_inverse, py::arg("p"));
  m.def(
      "multinomial_logpmf_factored",
      [](const std::vector<std::int64_t>& y, std::int64_t total,
         const Eigen::VectorXd& nu) {
        return mnstm::multinomial_logpmf_factored(y, total, nu);
      },
      py::arg("y"), py::arg("total"), py::arg("nu"));

  m.def(
      "effective_sample_size",
      [](const Eigen::VectorXd& trace) {
        const mnstm::EssReport report = mnstm::effective_sample_size(trace);
        return py::make_tuple(report.ess, report.degenerate);
      },
      py::arg("trace"));
  m.def(
      "median_relative_absolute_error",
      [](const std::vector<double>& truth, const std::vector<double>& totals,
         const std::vector<double>& estimate, int k, int n, int t) {
        return mnstm::median_relative_absolute_error(truth, totals, estimate,
                                                     k, n, t)
            .median;
      },
      py::arg("truth"), py::arg("totals"), py::arg("estimate"), py::arg("K"),
      py::arg("N"), py::arg("T"));

  py::class_<mnstm::RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("counts_path", &mnstm::RunConfig::counts_path)
      .def_readwrite("adjacency_path", &mnstm::RunConfig::adjacency_path)
      .def_readwrite("covariates_path", &mnstm::RunConfig::covariates_path)
      .def_readwrite("truth_path", &mnstm::RunConfig::truth_path)
      .def_readwrite("output_dir", &mnstm::RunConfig::output_dir)
      .def_readwrite("model", &mnstm::RunConfig::model)
      .def_readwrite("rank", &mnstm::RunConfig::rank)
      .def_readwrite("simulate_only", &mnstm::RunConfig::simulate_only)
      .def_property(
          "iterations",
          [](const mnstm::RunConfig& c) { return c.chain.iterations; },
          [](mnstm::RunConfig& c, int v) { c.chain.iterations = v; })
      .def_property(
          "seed", [](const mnstm::RunConfig& c) { return c.chain.seed; },
          [](mnstm::RunConfig& c, std::uint64_t v) { c.chain.seed = v; })
      .def_property(
          "design_variant",
          [](const mnstm::RunConfig& c) {
            return c.design.variant == mnstm::SimVariant::kStaticLmlb
                       ? "static-lmlb"
                       : "empirical-mnstm";
          },
          [](mnstm::RunConfig& c, const std::string& v) {
            c.design.variant = v == "static-lmlb"
                                   ? mnstm::SimVariant::kStaticLmlb
                                   : mnstm::SimVariant::kEmpiricalMnstm;
          })
      .def_property(
          "design_n_units",
          [](const mnstm::RunConfig& c) { return c.design.n_units; },
          [](mnstm::RunConfig& c, int v) { c.design.n_units = v; })
      .def_property(
          "design_categories",
          [](const mnstm::RunConfig& c) { return c.design.k_categories; },
          [](mnstm::RunConfig& c, int v) { c.design.k_categories = v; })
      .def_property(
          "design_time_points",
          [](const mnstm::RunConfig& c) { return c.design.t_points; },
          [](mnstm::RunConfig& c, int v) { c.design.t_points = v; })
      .def_property(
          "design_rank",
          [](const mnstm::RunConfig& c) { return c.design.rank; },
          [](mnstm::RunConfig& c, int v) { c.design.rank = v; })
      .def_property(
          "design_cell_total",
          [](const mnstm::RunConfig& c) {
            return static_cast<std::int64_t>(c.design.cell_total);
          },
          [](mnstm::RunConfig& c, std::int64_t v) { c.design.cell_total = v; })
      .def_property(
          "design_observed_fraction",
          [](const mnstm::RunConfig& c) { return c.design.observed_fraction; },
          [](mnstm::RunConfig& c, double v) { c.design.observed_fraction = v; });

  m.def(
      "run",
      [](const mnstm::RunConfig& config) {
        std::ostringstream log;
        const int code = mnstm::run(config, log);
        return py::make_tuple(code, log.str());
      },
      py::arg("config"),
      "Execute a fit or simulation; returns (exit_code, log_text).");
}
