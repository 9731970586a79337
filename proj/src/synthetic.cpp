#include "gzz/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace gzz {

double CovariateGenerator::operator()(RandomStream& rng) const {
  // Both draws are always consumed so the stream does not depend on epsilon.
  const double u = rng.uniform();
  const double z = rng.normal();
  return u < epsilon ? z : 0.0;
}

MatrixXd CovariateGenerator::matrix(Index rows, Index cols, RandomStream& rng) const {
  MatrixXd X(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) X(r, c) = (*this)(rng);
  return X;
}

namespace {

VectorXd sparse_coefficients(Index p, double nonzero_fraction, RandomStream& rng) {
  const auto nonzero = static_cast<Index>(std::ceil(nonzero_fraction * static_cast<double>(p) - 1e-12));
  VectorXd v = VectorXd::Zero(p);
  for (Index i = 0; i < p; ++i) {
    const double z = rng.normal();
    if (i < nonzero) v[i] = z;
  }
  return v;
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1]");
}

}  // namespace

RandomEffectsTruth default_random_effects_truth(Index p, Index n_groups, double nonzero_fraction,
                                                std::uint64_t seed) {
  RandomStream rng(seed, StreamTag::kData, 1);
  RandomEffectsTruth truth;
  truth.upsilon = sparse_coefficients(p, nonzero_fraction, rng);
  truth.m = rng.normal();
  truth.beta.resize(n_groups);
  for (Index k = 0; k < n_groups; ++k) truth.beta[k] = rng.normal();
  return truth;
}

LogisticTruth default_logistic_truth(Index p, double nonzero_fraction, std::uint64_t seed) {
  RandomStream rng(seed, StreamTag::kData, 1);
  LogisticTruth truth;
  truth.upsilon.resize(p + 1);
  truth.upsilon[0] = rng.normal();
  truth.upsilon.tail(p) = sparse_coefficients(p, nonzero_fraction, rng);
  return truth;
}

GroupedData generate_random_effects_data(Index n_per_group, Index n_groups, double epsilon,
                                         const RandomEffectsTruth& truth, std::uint64_t seed) {
  check_epsilon(epsilon);
  if (n_per_group < 1 || n_groups < 1) throw std::invalid_argument("dimensions must be positive");
  RandomStream rng(seed, StreamTag::kData, 2);
  const Index p = truth.upsilon.size();
  const Index n = n_per_group * n_groups;
  GroupedData data;
  data.n_groups = n_groups;
  data.X = CovariateGenerator{epsilon}.matrix(n, p, rng);
  data.y.resize(n);
  data.group.resize(n);
  for (Index k = 0; k < n_groups; ++k) {
    for (Index s = 0; s < n_per_group; ++s) {
      const Index r = k * n_per_group + s;
      data.group[r] = static_cast<int>(k);
      const double psi = truth.m + truth.beta[k] + data.X.row(r).dot(truth.upsilon);
      data.y[r] = rng.bernoulli(logistic(psi)) ? 1.0 : 0.0;
    }
  }
  return data;
}

LogisticData generate_logistic_data(Index n, double epsilon, const LogisticTruth& truth, std::uint64_t seed) {
  check_epsilon(epsilon);
  if (n < 1) throw std::invalid_argument("dimensions must be positive");
  RandomStream rng(seed, StreamTag::kData, 2);
  const Index p = truth.upsilon.size() - 1;
  LogisticData data;
  data.X = CovariateGenerator{epsilon}.matrix(n, p, rng);
  data.y.resize(n);
  for (Index j = 0; j < n; ++j) {
    const double psi = truth.upsilon[0] + data.X.row(j).dot(truth.upsilon.tail(p));
    data.y[j] = rng.bernoulli(logistic(psi)) ? 1.0 : 0.0;
  }
  return data;
}

namespace {

template <typename Matrix>
void write_rows(std::ostream& out, const Matrix& X, const VectorXd& y, const Eigen::VectorXi* group) {
  out << "y";
  for (Index c = 1; c <= X.cols(); ++c) out << ",x" << c;
  if (group) out << ",g";
  out << '\n' << std::setprecision(17);
  for (Index r = 0; r < X.rows(); ++r) {
    out << static_cast<int>(y[r]);
    for (Index c = 0; c < X.cols(); ++c) out << ',' << X(r, c);
    if (group) out << ',' << (*group)[r] + 1;
    out << '\n';
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  return out;
}

}  // namespace

void write_dataset_csv(std::ostream& out, const LogisticData& data) { write_rows(out, data.X, data.y, nullptr); }
void write_dataset_csv(std::ostream& out, const GroupedData& data) { write_rows(out, data.X, data.y, &data.group); }
void write_dataset_csv(const std::string& path, const LogisticData& data) {
  auto out = open_out(path);
  write_dataset_csv(out, data);
}
void write_dataset_csv(const std::string& path, const GroupedData& data) {
  auto out = open_out(path);
  write_dataset_csv(out, data);
}

LogisticData Dataset::logistic() const {
  LogisticData out;
  out.X = grouped.X;
  out.y = grouped.y;
  return out;
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty dataset");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string h;
    while (std::getline(ss, h, ',')) header.push_back(h);
  }
  Index y_col = -1;
  Index g_col = -1;
  std::vector<Index> x_cols;
  for (Index c = 0; c < static_cast<Index>(header.size()); ++c) {
    const auto& h = header[c];
    if (h == "y") {
      y_col = c;
    } else if (h == "g") {
      g_col = c;
    } else if (h.size() > 1 && h[0] == 'x') {
      const auto idx = static_cast<std::size_t>(std::stoul(h.substr(1)));
      if (x_cols.size() < idx) x_cols.resize(idx, -1);
      x_cols[idx - 1] = c;
    }
  }
  if (y_col < 0) throw std::invalid_argument("dataset has no y column");
  for (auto c : x_cols)
    if (c < 0) throw std::invalid_argument("covariate columns must be x1..xp without gaps");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) row.push_back(std::stod(f));
    if (row.size() != header.size()) throw std::invalid_argument("dataset row has the wrong number of fields");
    rows.push_back(std::move(row));
  }

  Dataset ds;
  ds.has_groups = g_col >= 0;
  auto& g = ds.grouped;
  const auto n = static_cast<Index>(rows.size());
  const auto p = static_cast<Index>(x_cols.size());
  g.X.resize(n, p);
  g.y.resize(n);
  g.group.setZero(n);
  int max_group = 0;
  for (Index r = 0; r < n; ++r) {
    g.y[r] = rows[r][y_col];
    for (Index c = 0; c < p; ++c) g.X(r, c) = rows[r][x_cols[c]];
    if (ds.has_groups) {
      g.group[r] = static_cast<int>(rows[r][g_col]) - 1;
      max_group = std::max(max_group, g.group[r]);
    }
  }
  g.n_groups = max_group + 1;
  g.validate();
  return ds;
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_dataset_csv(in);
}

}  // namespace gzz
