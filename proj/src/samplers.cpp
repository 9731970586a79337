#include "gzz/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gzz {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kEnvelopeTolerance = 1e-9;

std::string violation_message(Index coordinate, double rate, double bound) {
  std::ostringstream os;
  os << "switching rate " << rate << " exceeds envelope " << bound << " at coordinate " << coordinate;
  return os.str();
}

class SkeletonSink final : public EventSink {
 public:
  explicit SkeletonSink(PdmpRun& run) : run_(run) {}

  void record(const SkeletonEvent& event, std::int64_t evals) override {
    if (event.kind == EventKind::kStart) {
      run_.skeleton = Skeleton(event.xi, event.theta, event.alpha);
    } else {
      run_.skeleton.append(event);
    }
    run_.evals_at_event.push_back(evals);
  }

 private:
  PdmpRun& run_;
};

}  // namespace

void ZigZagConfig::validate(Index p) const {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (refresh_gamma.size() != 0 && refresh_gamma.size() != p) {
    throw std::invalid_argument("refresh_gamma needs one entry per coordinate");
  }
  if ((refresh_gamma.array() < 0.0).any()) throw std::invalid_argument("refresh rates must be nonnegative");
  if (batch_size < 0) throw std::invalid_argument("batch size must be nonnegative");
}

void GzzConfig::validate(Index p) const {
  zz.validate(p);
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be nonnegative");
}

EnvelopeViolation::EnvelopeViolation(Index coordinate_, double rate_, double bound_)
    : std::runtime_error(violation_message(coordinate_, rate_, bound_)),
      coordinate(coordinate_),
      rate(rate_),
      bound(bound_) {}

KernelFailure::KernelFailure(std::size_t index, const std::string& what)
    : std::runtime_error("kernel failed at event " + std::to_string(index) + ": " + what), event_index(index) {}

double PdmpRun::epochs_after(double t0) const {
  const std::size_t k = skeleton.segment_index(std::clamp(t0, 0.0, skeleton.final_time()));
  const auto spent = epochs.grad_point_evals - evals_at_event[k];
  return static_cast<double>(spent) / static_cast<double>(epochs.n_data);
}

PdmpStats run_gzz(const TargetModel& model, const GibbsKernel& kernel, const StartState& start, const GzzConfig& cfg,
                  EventSink& sink) {
  const Index p = model.dim();
  cfg.validate(p);
  if (start.xi.size() != p || start.theta.size() != p || start.alpha.size() != model.hyper_dim()) {
    throw std::invalid_argument("start state does not match the model dimensions");
  }
  if (cfg.eta > 0.0 && !kernel) throw std::invalid_argument("a kernel is required when eta > 0");

  const ZigZagConfig& zz = cfg.zz;
  const VectorXd gamma = zz.refresh_gamma.size() == p ? zz.refresh_gamma : VectorXd::Zero(p);
  const SubsampleEstimator estimator(model, zz.batch_size);

  std::vector<RandomStream> thinning;
  thinning.reserve(static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i) thinning.emplace_back(zz.seed, StreamTag::kThinning, static_cast<std::uint64_t>(i));
  RandomStream eta_clock(zz.seed, StreamTag::kEtaClock);
  RandomStream kernel_rng(zz.seed, StreamTag::kKernel);

  PdmpStats stats;
  stats.epochs = make_epoch_counter(model);

  SkeletonEvent state{0.0, start.xi, start.theta, start.alpha, EventKind::kStart};
  sink.record(state, 0);
  std::size_t recorded = 0;

  std::vector<AffineRateBound> bounds(static_cast<std::size_t>(p));
  while (true) {
    // Candidate clocks are all redrawn after every event; exponential clocks
    // are memoryless so this is exact.
    double best = kInfinity;
    Index coord = -1;
    for (Index i = 0; i < p; ++i) {
      AffineRateBound b = model.envelope(state.xi, state.theta, state.alpha, i);
      b.intercept += gamma[i];
      bounds[static_cast<std::size_t>(i)] = b;
      const double tau = first_arrival_affine(b, thinning[static_cast<std::size_t>(i)].exponential());
      if (tau < best) {
        best = tau;
        coord = i;
      }
    }
    const double tau_eta = cfg.eta > 0.0 ? eta_clock.exponential() / cfg.eta : kInfinity;
    const bool hyper = tau_eta < best;
    const double tau = hyper ? tau_eta : best;

    if (!(state.t + tau < zz.horizon)) {
      const double t_end = zz.horizon;
      state.xi += state.theta * (t_end - state.t);
      state.t = t_end;
      state.kind = EventKind::kEnd;
      sink.record(state, stats.epochs.grad_point_evals);
      break;
    }

    const double t_next = state.t + tau;
    state.xi += state.theta * (t_next - state.t);
    state.t = t_next;

    if (hyper) {
      try {
        state.alpha = kernel(state.xi, state.alpha, kernel_rng);
      } catch (const std::exception& e) {
        throw KernelFailure(recorded + 1, e.what());
      }
      state.kind = EventKind::kHyper;
      ++stats.hyper_events;
      sink.record(state, stats.epochs.grad_point_evals);
      ++recorded;
    } else {
      auto& rng = thinning[static_cast<std::size_t>(coord)];
      ++stats.candidates;
      const double arg = estimator.rate_arg(state.xi, state.theta, state.alpha, coord, rng, stats.epochs);
      const double rate = std::max(arg, 0.0) + gamma[coord];
      const double bound = bounds[static_cast<std::size_t>(coord)](tau);
      if (rate > bound + kEnvelopeTolerance * std::abs(bound) + 1e-14) {
        throw EnvelopeViolation(coord, rate, bound);
      }
      if (rng.uniform() * bound < rate) {
        state.theta[coord] = -state.theta[coord];
        state.kind = EventKind::kBounce;
        ++stats.bounces;
        sink.record(state, stats.epochs.grad_point_evals);
        ++recorded;
      }
    }
    if (zz.max_events != 0 && recorded >= zz.max_events) break;
  }
  stats.final_time = state.t;
  return stats;
}

PdmpRun run_gzz(const TargetModel& model, const GibbsKernel& kernel, const StartState& start, const GzzConfig& cfg) {
  PdmpRun run{{}, Skeleton(start.xi, start.theta, start.alpha), {}};
  SkeletonSink sink(run);
  static_cast<PdmpStats&>(run) = run_gzz(model, kernel, start, cfg, sink);
  return run;
}

PdmpRun run_zigzag(const TargetModel& model, const VectorXd& alpha_fixed, const VectorXd& xi0,
                   const VectorXd& theta0, const ZigZagConfig& cfg) {
  GzzConfig gcfg{cfg, 0.0};
  return run_gzz(model, GibbsKernel{}, StartState{xi0, theta0, alpha_fixed}, gcfg);
}

// ---------------------------------------------------------------------------

double HyperEventStats::standard_error(double eta) const {
  return duration > 0.0 ? std::sqrt(eta / duration) : kInfinity;
}

bool HyperEventStats::consistent_with(double eta, double n_se) const {
  return std::abs(rate - eta) <= n_se * standard_error(eta);
}

HyperEventStats hyper_update_counterfactual_check(const Skeleton& sk) {
  HyperEventStats s;
  for (const auto& e : sk.events()) {
    if (e.kind == EventKind::kBounce) ++s.bounce_events;
    if (e.kind == EventKind::kHyper) ++s.hyper_events;
  }
  s.duration = sk.final_time();
  s.rate = s.duration > 0.0 ? static_cast<double>(s.hyper_events) / s.duration : 0.0;
  return s;
}

}  // namespace gzz
