#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gzz/model.hpp"

namespace gzz {

/// Counts per-data-point gradient evaluations. Models without data charge one
/// unit per rate or gradient evaluation, with n_data = 1.
struct EpochCounter {
  std::int64_t grad_point_evals = 0;
  Index n_data = 1;

  void charge(std::int64_t evals) { grad_point_evals += evals; }
};

double epoch_report(const EpochCounter& counter);

/// Unbiased mini-batch estimate of d U / d xi_i:
///   G_i = d_i U0(xi, alpha) + (n / B) sum_{j in J} d_i U^j(xi),
/// J drawn uniformly without replacement, fresh for every call.
class SubsampleEstimator {
 public:
  /// batch_size == 0 selects the full data set.
  SubsampleEstimator(const TargetModel& model, Index batch_size);

  Index batch_size() const { return batch_size_; }
  Index n_data() const { return model_.n_data(); }
  bool full_batch() const { return batch_size_ == model_.n_data(); }

  /// theta_i * G_i for a fresh batch; charges the batch to `epochs`.
  double rate_arg(const VectorXd& xi, const VectorXd& theta, const VectorXd& alpha, Index i, RandomStream& rng,
                  EpochCounter& epochs) const;

  /// G_i for an explicit batch (no charge).
  double estimate(const VectorXd& xi, const VectorXd& alpha, Index i, std::span<const Index> batch) const;

  /// Uniform draw of batch_size distinct indices from [0, n).
  void draw_batch(RandomStream& rng, std::vector<Index>& out) const;

 private:
  const TargetModel& model_;
  Index batch_size_;
};

EpochCounter make_epoch_counter(const TargetModel& model);

}  // namespace gzz
