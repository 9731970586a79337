#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gzz/model.hpp"
#include "gzz/skeleton.hpp"
#include "gzz/subsampling.hpp"

namespace gzz {

struct ZigZagConfig {
  /// Excess switching rate per coordinate; empty means zero everywhere.
  VectorXd refresh_gamma;
  double horizon = 1.0;
  std::uint64_t seed = 0;
  /// Mini-batch size for the rate estimates; 0 uses all data.
  Index batch_size = 0;
  /// Stop after this many recorded events (excluding the start); 0 = no limit.
  std::size_t max_events = 0;

  void validate(Index p) const;
};

struct GzzConfig {
  ZigZagConfig zz;
  /// Rate of hyperparameter refresh events.
  double eta = 1.0;

  void validate(Index p) const;
};

struct StartState {
  VectorXd xi;
  VectorXd theta;
  VectorXd alpha;
};

/// Thrown when a thinning candidate's true rate exceeds its envelope.
class EnvelopeViolation : public std::runtime_error {
 public:
  EnvelopeViolation(Index coordinate, double rate, double bound);
  Index coordinate;
  double rate;
  double bound;
};

/// Raised when the Gibbs kernel fails; carries the event index.
class KernelFailure : public std::runtime_error {
 public:
  KernelFailure(std::size_t event_index, const std::string& what);
  std::size_t event_index;
};

/// Receives the start state and every recorded event, in order.
class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void record(const SkeletonEvent& event, std::int64_t grad_point_evals) = 0;
};

struct PdmpStats {
  EpochCounter epochs;
  std::int64_t candidates = 0;
  std::int64_t bounces = 0;
  std::int64_t hyper_events = 0;
  double final_time = 0.0;
};

struct PdmpRun : PdmpStats {
  Skeleton skeleton;
  /// Cumulative grad_point_evals at each skeleton event.
  std::vector<std::int64_t> evals_at_event;

  /// Epochs spent over [t0, final_time].
  double epochs_after(double t0) const;
};

/// Zig-zag process on xi with alpha held fixed.
PdmpRun run_zigzag(const TargetModel& model, const VectorXd& alpha_fixed, const VectorXd& xi0,
                   const VectorXd& theta0, const ZigZagConfig& cfg);

/// Gibbs zig-zag: zig-zag on xi superimposed with kernel refreshes of alpha at
/// the arrivals of a rate-eta Poisson clock.
PdmpRun run_gzz(const TargetModel& model, const GibbsKernel& kernel, const StartState& start, const GzzConfig& cfg);

/// Streaming form: events go to `sink` instead of a Skeleton. An empty
/// kernel is allowed only when eta == 0.
PdmpStats run_gzz(const TargetModel& model, const GibbsKernel& kernel, const StartState& start, const GzzConfig& cfg,
                  EventSink& sink);

struct HyperEventStats {
  std::int64_t bounce_events = 0;
  std::int64_t hyper_events = 0;
  double duration = 0.0;
  double rate = 0.0;
  /// Poisson standard error of `rate` under the null rate `eta`.
  double standard_error(double eta) const;
  bool consistent_with(double eta, double n_se = 3.0) const;
};

HyperEventStats hyper_update_counterfactual_check(const Skeleton& sk);

}  // namespace gzz
