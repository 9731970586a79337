#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <Eigen/Core>

#include "gzz/model.hpp"
#include "gzz/random_effects.hpp"

namespace gzz {

/// Covariate entries are N(0, 1) with probability epsilon and 0 otherwise, so
/// epsilon = 0.05 gives 95% sparse columns with about epsilon * n non-zeros.
struct CovariateGenerator {
  double epsilon = 0.5;

  double operator()(RandomStream& rng) const;
  MatrixXd matrix(Index rows, Index cols, RandomStream& rng) const;
};

struct RandomEffectsTruth {
  VectorXd upsilon;
  double m = 0.0;
  VectorXd beta;
};

/// Coefficients of a spike-and-slab/logistic truth: upsilon_0 first.
struct LogisticTruth {
  VectorXd upsilon;
};

/// Nonzero pattern on the first ceil(fraction * p) covariates, values N(0, 1);
/// m and beta are N(0, 1).
RandomEffectsTruth default_random_effects_truth(Index p, Index n_groups, double nonzero_fraction,
                                                std::uint64_t seed);
LogisticTruth default_logistic_truth(Index p, double nonzero_fraction, std::uint64_t seed);

/// n_per_group subjects in each of n_groups groups.
GroupedData generate_random_effects_data(Index n_per_group, Index n_groups, double epsilon,
                                         const RandomEffectsTruth& truth, std::uint64_t seed);
/// Raw covariates (no intercept column) and responses.
LogisticData generate_logistic_data(Index n, double epsilon, const LogisticTruth& truth, std::uint64_t seed);

/// CSV with header y,x1..xp[,g]; group ids are written 1-based.
void write_dataset_csv(std::ostream& out, const LogisticData& data);
void write_dataset_csv(std::ostream& out, const GroupedData& data);
void write_dataset_csv(const std::string& path, const LogisticData& data);
void write_dataset_csv(const std::string& path, const GroupedData& data);

/// Reads either layout; `has_groups` reports whether a `g` column was present.
struct Dataset {
  GroupedData grouped;  // group ids all zero and n_groups = 1 when absent
  bool has_groups = false;
  LogisticData logistic() const;
};
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::string& path);

}  // namespace gzz
