#include "gzz/subsampling.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace gzz {

double epoch_report(const EpochCounter& counter) {
  if (counter.n_data <= 0) throw std::invalid_argument("n_data must be positive");
  return static_cast<double>(counter.grad_point_evals) / static_cast<double>(counter.n_data);
}

EpochCounter make_epoch_counter(const TargetModel& model) {
  return {0, std::max<Index>(model.n_data(), 1)};
}

SubsampleEstimator::SubsampleEstimator(const TargetModel& model, Index batch_size)
    : model_(model), batch_size_(batch_size == 0 ? model.n_data() : batch_size) {
  if (model.n_data() > 0 && (batch_size_ < 1 || batch_size_ > model.n_data())) {
    throw std::invalid_argument("batch size must lie in [1, n]");
  }
}

void SubsampleEstimator::draw_batch(RandomStream& rng, std::vector<Index>& out) const {
  const Index n = model_.n_data();
  out.clear();
  if (batch_size_ == n) {
    out.resize(static_cast<std::size_t>(n));
    std::iota(out.begin(), out.end(), Index{0});
    return;
  }
  // Floyd's algorithm: B distinct indices in O(B) draws.
  for (Index k = n - batch_size_; k < n; ++k) {
    const Index candidate = rng.index(k + 1);
    if (std::find(out.begin(), out.end(), candidate) == out.end()) {
      out.push_back(candidate);
    } else {
      out.push_back(k);
    }
  }
}

double SubsampleEstimator::estimate(const VectorXd& xi, const VectorXd& alpha, Index i,
                                    std::span<const Index> batch) const {
  double g = model_.prior_partial(xi, alpha, i);
  if (batch.empty()) return g;
  double sum = 0.0;
  for (Index j : batch) sum += model_.data_partial(xi, j, i);
  return g + static_cast<double>(model_.n_data()) / static_cast<double>(batch.size()) * sum;
}

double SubsampleEstimator::rate_arg(const VectorXd& xi, const VectorXd& theta, const VectorXd& alpha, Index i,
                                    RandomStream& rng, EpochCounter& epochs) const {
  if (model_.n_data() == 0) {
    epochs.charge(1);
    return theta[i] * model_.prior_partial(xi, alpha, i);
  }
  thread_local std::vector<Index> batch;
  draw_batch(rng, batch);
  epochs.charge(batch_size_);
  return theta[i] * estimate(xi, alpha, i, batch);
}

}  // namespace gzz
