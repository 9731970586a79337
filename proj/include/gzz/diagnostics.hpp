#pragma once

#include <cstdint>
#include <stdexcept>

#include <Eigen/Core>

#include "gzz/samplers.hpp"
#include "gzz/skeleton.hpp"
#include "json.hpp"

namespace gzz {

class DiagnosticsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// (1 / (t - t0)) * integral_{t0}^{t} f(s)^power ds for coordinate `coord`,
/// where coord < p addresses xi and coord >= p addresses alpha[coord - p].
/// Exact: xi is linear and alpha constant on each segment.
double trajectory_moment(const Skeleton& sk, Index coord, int power, double t0 = 0.0);

/// xi sampled at t0, t0 + dt, t0 + 2 dt, ... <= final time.
struct DiscretizedChain {
  double dt = 1.0;
  double t0 = 0.0;
  MatrixXd samples;
};

DiscretizedChain discretize(const Skeleton& sk, double dt, double t0 = 0.0);

/// Builds a DiscretizedChain while a sampler runs, without storing the skeleton.
/// Also remembers the evaluation count at t0 for burn-in accounting.
class GridRecorder final : public EventSink {
 public:
  GridRecorder(double dt, double t0, double horizon, Index p);

  void record(const SkeletonEvent& event, std::int64_t grad_point_evals) override;

  const DiscretizedChain& chain() const { return chain_; }
  std::int64_t evals_at_t0() const { return evals_at_t0_; }

 private:
  void fill_until(double t_end, bool inclusive);

  DiscretizedChain chain_;
  Index next_ = 0;
  SkeletonEvent last_;
  bool started_ = false;
  std::int64_t evals_at_t0_ = 0;
  std::int64_t last_evals_ = 0;
};

/// Integrated autocorrelation time in steps: 1 + 2 sum_k rho(k), truncated
/// with Geyer's initial positive sequence and floored at 1/log10(N).
double iact(const Eigen::Ref<const VectorXd>& series);
double iact(const DiscretizedChain& chain, Index coord);

struct EfficiencySummary {
  VectorXd iact;
  VectorXd ess;
  VectorXd ess_per_epoch;
  Index slowest_coordinate = 0;
  double dt = 1.0;
  double epochs = 1.0;

  double slowest_iact() const { return iact[slowest_coordinate]; }
  double slowest_ess_per_epoch() const { return ess_per_epoch[slowest_coordinate]; }
};

/// One row per time step, one column per coordinate.
EfficiencySummary efficiency_summary(const MatrixXd& samples, double epochs, double dt);
EfficiencySummary efficiency_summary(const DiscretizedChain& chain, double epochs);
/// dt <= 0 selects (final_time - t0) / 1e4.
EfficiencySummary efficiency_summary(const Skeleton& sk, double epochs, double dt = 0.0, double t0 = 0.0);

/// Fields iact, ess, ess_per_epoch, slowest_coordinate (1-based), dt, epochs.
nlohmann::json to_json(const EfficiencySummary& s);

}  // namespace gzz
