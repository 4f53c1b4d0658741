#include "mnstm/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace mnstm {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

long long parse_int(const std::string& s, const std::string& what, int line_no) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("line " + std::to_string(line_no) +
                                ": cannot parse " + what + " from '" + s + "'");
  }
}

double parse_double(const std::string& s, const std::string& what, int line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("line " + std::to_string(line_no) +
                                ": cannot parse " + what + " from '" + s + "'");
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open " + path);
  }
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // \n line endings everywhere
  if (!out) {
    throw std::invalid_argument("cannot write " + path);
  }
  return out;
}

}  // namespace

CountPanel load_count_panel(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) {
    throw std::invalid_argument(path + ": empty panel file");
  }
  ++line_no;
  if (line != "k,i,t,y" && line != "k,i,t,y\r") {
    throw std::invalid_argument(path + ": expected header k,i,t,y");
  }
  struct Row {
    int k, i, t;
    long long y;
  };
  std::vector<Row> rows;
  std::set<std::tuple<int, int, int>> seen;
  int max_k = -1, max_i = -1, max_t = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 4) {
      throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                  ": expected 4 fields");
    }
    Row row;
    row.k = static_cast<int>(parse_int(fields[0], "k", line_no));
    row.i = static_cast<int>(parse_int(fields[1], "i", line_no));
    row.t = static_cast<int>(parse_int(fields[2], "t", line_no));
    row.y = parse_int(fields[3], "y", line_no);
    if (row.k < 0 || row.i < 0 || row.t < 0 || row.y < 0) {
      throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                  ": negative value");
    }
    if (!seen.insert({row.k, row.i, row.t}).second) {
      throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                  ": duplicate key");
    }
    max_k = std::max(max_k, row.k);
    max_i = std::max(max_i, row.i);
    max_t = std::max(max_t, row.t);
    rows.push_back(row);
  }
  if (rows.empty()) {
    throw std::invalid_argument(path + ": empty panel file");
  }
  CountPanel panel = CountPanel::zeros(max_k + 1, max_i + 1, max_t + 1);
  std::fill(panel.observed.begin(), panel.observed.end(), 0);
  std::map<std::pair<int, int>, int> categories_seen;
  for (const auto& row : rows) {
    panel.y(row.k, row.i, row.t) = row.y;
    panel.set_observed(row.i, row.t, true);
    ++categories_seen[{row.i, row.t}];
  }
  for (const auto& [cell, count] : categories_seen) {
    if (count != panel.K) {
      throw std::invalid_argument(
          path + ": cell (i=" + std::to_string(cell.first) +
          ", t=" + std::to_string(cell.second) + ") lists " +
          std::to_string(count) + " of " + std::to_string(panel.K) +
          " categories");
    }
  }
  panel.validate();
  return panel;
}

void save_count_panel(const CountPanel& panel, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "k,i,t,y\n";
  for (int t = 0; t < panel.T; ++t) {
    for (int i = 0; i < panel.N; ++i) {
      if (!panel.is_observed(i, t)) continue;
      for (int k = 0; k < panel.K; ++k) {
        out << k << ',' << i << ',' << t << ',' << panel.y(k, i, t) << '\n';
      }
    }
  }
}

Adjacency load_adjacency(const std::string& path, int n_nodes) {
  std::ifstream in = open_input(path);
  Adjacency adj;
  adj.edges = Eigen::MatrixXd::Zero(n_nodes, n_nodes);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    long long i, j;
    if (!(ss >> i >> j)) {
      throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                  ": expected `i j`");
    }
    if (i < 0 || j < 0 || i >= n_nodes || j >= n_nodes) {
      throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                  ": node index out of range");
    }
    if (i == j) {
      throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                  ": self loops are not allowed");
    }
    adj.edges(i, j) = 1.0;
    adj.edges(j, i) = 1.0;
  }
  adj.validate();
  return adj;
}

void save_adjacency(const Adjacency& adj, const std::string& path) {
  std::ofstream out = open_output(path);
  for (int i = 0; i < adj.n_nodes(); ++i) {
    for (int j = i + 1; j < adj.n_nodes(); ++j) {
      if (adj.edges(i, j) != 0.0) out << i << ' ' << j << '\n';
    }
  }
}

std::vector<double> load_totals(const std::string& path, int N, int T) {
  std::ifstream in = open_input(path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) {
    throw std::invalid_argument(path + ": empty file");
  }
  ++line_no;
  std::vector<double> totals(static_cast<std::size_t>(N) * T, -1.0);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 3) {
      throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                  ": expected 3 fields");
    }
    const int i = static_cast<int>(parse_int(fields[0], "i", line_no));
    const int t = static_cast<int>(parse_int(fields[1], "t", line_no));
    if (i < 0 || i >= N || t < 0 || t >= T) {
      throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                  ": index out of range");
    }
    totals[static_cast<std::size_t>(i) * T + t] =
        static_cast<double>(parse_int(fields[2], "m", line_no));
  }
  for (const double v : totals) {
    if (v < 0.0) {
      throw std::invalid_argument(path + ": grid not fully covered");
    }
  }
  return totals;
}

void save_totals(const std::vector<double>& totals, int N, int T,
                 const std::string& path) {
  std::ofstream out = open_output(path);
  out << "i,t,m\n";
  for (int i = 0; i < N; ++i) {
    for (int t = 0; t < T; ++t) {
      out << i << ',' << t << ','
          << static_cast<long long>(totals[static_cast<std::size_t>(i) * T + t])
          << '\n';
    }
  }
}

std::vector<double> load_probability_tensor(const std::string& path, int K,
                                            int N, int T) {
  std::ifstream in = open_input(path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) {
    throw std::invalid_argument(path + ": empty file");
  }
  ++line_no;
  std::vector<double> values(static_cast<std::size_t>(K) * N * T, -1.0);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 4) {
      throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                  ": expected 4 fields");
    }
    const int k = static_cast<int>(parse_int(fields[0], "k", line_no));
    const int i = static_cast<int>(parse_int(fields[1], "i", line_no));
    const int t = static_cast<int>(parse_int(fields[2], "t", line_no));
    if (k < 0 || k >= K || i < 0 || i >= N || t < 0 || t >= T) {
      throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                  ": index out of range");
    }
    values[static_cast<std::size_t>((k * N + i)) * T + t] =
        parse_double(fields[3], "value", line_no);
  }
  for (const double v : values) {
    if (v < 0.0) {
      throw std::invalid_argument(path + ": grid not fully covered");
    }
  }
  return values;
}

void save_probability_tensor(const std::vector<double>& values, int K, int N,
                             int T, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "k,i,t,pi\n";
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < N; ++i) {
      for (int t = 0; t < T; ++t) {
        out << k << ',' << i << ',' << t << ','
            << format_double(values[static_cast<std::size_t>((k * N + i)) * T + t])
            << '\n';
      }
    }
  }
}

void write_posterior_summary(const PosteriorSummary& summary,
                             const std::string& path) {
  std::ofstream out = open_output(path);
  out << "k,i,t,mean,sd,q025,q975\n";
  for (int k = 0; k < summary.K; ++k) {
    for (int i = 0; i < summary.N; ++i) {
      for (int t = 0; t < summary.T; ++t) {
        const std::size_t c = summary.cell(k, i, t);
        out << k << ',' << i << ',' << t << ',' << format_double(summary.mean[c])
            << ',' << format_double(summary.sd[c]) << ','
            << format_double(summary.q025[c]) << ','
            << format_double(summary.q975[c]) << '\n';
      }
    }
  }
}

PosteriorSummary load_posterior_summary(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) {
    throw std::invalid_argument(path + ": empty file");
  }
  ++line_no;
  struct Row {
    int k, i, t;
    double mean, sd, q025, q975;
  };
  std::vector<Row> rows;
  int max_k = -1, max_i = -1, max_t = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 7) {
      throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                  ": expected 7 fields");
    }
    Row row;
    row.k = static_cast<int>(parse_int(fields[0], "k", line_no));
    row.i = static_cast<int>(parse_int(fields[1], "i", line_no));
    row.t = static_cast<int>(parse_int(fields[2], "t", line_no));
    row.mean = parse_double(fields[3], "mean", line_no);
    row.sd = parse_double(fields[4], "sd", line_no);
    row.q025 = parse_double(fields[5], "q025", line_no);
    row.q975 = parse_double(fields[6], "q975", line_no);
    max_k = std::max(max_k, row.k);
    max_i = std::max(max_i, row.i);
    max_t = std::max(max_t, row.t);
    rows.push_back(row);
  }
  PosteriorSummary summary;
  summary.K = max_k + 1;
  summary.N = max_i + 1;
  summary.T = max_t + 1;
  const std::size_t cells =
      static_cast<std::size_t>(summary.K) * summary.N * summary.T;
  summary.mean.assign(cells, 0.0);
  summary.sd.assign(cells, 0.0);
  summary.q025.assign(cells, 0.0);
  summary.q975.assign(cells, 0.0);
  for (const auto& row : rows) {
    const std::size_t c = summary.cell(row.k, row.i, row.t);
    summary.mean[c] = row.mean;
    summary.sd[c] = row.sd;
    summary.q025[c] = row.q025;
    summary.q975[c] = row.q975;
  }
  return summary;
}

std::vector<Eigen::MatrixXd> load_covariates(const std::string& path, int K,
                                             int N, int T) {
  std::ifstream in = open_input(path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) {
    throw std::invalid_argument(path + ": empty file");
  }
  ++line_no;
  const auto header = split_csv(line);
  if (header.size() < 4 || header[0] != "k" || header[1] != "i" ||
      header[2] != "t") {
    throw std::invalid_argument(path + ": expected header k,i,t,x0,...");
  }
  const int p = static_cast<int>(header.size()) - 3;
  const int rows_per_t = (K - 1) * N;
  std::vector<Eigen::MatrixXd> x(T, Eigen::MatrixXd::Zero(rows_per_t, p));
  std::vector<char> filled(static_cast<std::size_t>(rows_per_t) * T, 0);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (static_cast<int>(fields.size()) != 3 + p) {
      throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                  ": wrong field count");
    }
    const int k = static_cast<int>(parse_int(fields[0], "k", line_no));
    const int i = static_cast<int>(parse_int(fields[1], "i", line_no));
    const int t = static_cast<int>(parse_int(fields[2], "t", line_no));
    if (k < 0 || k >= K - 1 || i < 0 || i >= N || t < 0 || t >= T) {
      throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                  ": index out of range");
    }
    for (int j = 0; j < p; ++j) {
      x[t](k * N + i, j) = parse_double(fields[3 + j], "x", line_no);
    }
    filled[static_cast<std::size_t>(t) * rows_per_t + k * N + i] = 1;
  }
  for (const char f : filled) {
    if (!f) {
      throw std::invalid_argument(path + ": covariate grid not fully covered");
    }
  }
  return x;
}

}  // namespace mnstm
