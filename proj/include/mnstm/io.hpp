#pragma once

#include <string>
#include <vector>

#include "mnstm/diagnostics.hpp"
#include "mnstm/moran.hpp"
#include "mnstm/panel.hpp"

namespace mnstm {

// CSV with header k,i,t,y; 0-indexed integer keys. Missing (i,t) pairs
// define the observation mask; every present pair must list all K
// categories. Errors carry the offending line number.
CountPanel load_count_panel(const std::string& path);
void save_count_panel(const CountPanel& panel, const std::string& path);

// Edge list, one undirected `i j` pair per line, 0-indexed. Self loops and
// out-of-range indices are rejected.
Adjacency load_adjacency(const std::string& path, int n_nodes);
void save_adjacency(const Adjacency& adj, const std::string& path);

// CSV with header i,t,m over the full (unit, time) grid; carries the cell
// totals of masked cells, which the counts file cannot.
std::vector<double> load_totals(const std::string& path, int N, int T);
void save_totals(const std::vector<double>& totals, int N, int T,
                 const std::string& path);

// CSV with header k,i,t,pi over the full grid.
std::vector<double> load_probability_tensor(const std::string& path, int K,
                                            int N, int T);
void save_probability_tensor(const std::vector<double>& values, int K, int N,
                             int T, const std::string& path);

// CSV with header k,i,t,mean,sd,q025,q975 over the full prediction grid.
void write_posterior_summary(const PosteriorSummary& summary,
                             const std::string& path);
PosteriorSummary load_posterior_summary(const std::string& path);

// Optional covariate file: header k,i,t,x0,...,x{p-1} over the full grid.
std::vector<Eigen::MatrixXd> load_covariates(const std::string& path, int K,
                                             int N, int T);

}  // namespace mnstm
