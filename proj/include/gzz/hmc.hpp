#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gzz/model.hpp"
#include "gzz/subsampling.hpp"

namespace gzz {

struct HmcConfig {
  double step_size = 0.1;
  Index n_leapfrog = 10;
  Index n_iterations = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

/// L leapfrog steps of size h for H(xi, r) = U(xi | alpha) + |r|^2 / 2,
/// unit mass. Each gradient evaluation is charged to `epochs` when given.
std::pair<VectorXd, VectorXd> leapfrog(const TargetModel& model, const VectorXd& alpha, VectorXd xi,
                                       VectorXd momentum, double step_size, Index n_steps,
                                       EpochCounter* epochs = nullptr);

struct HmcRun {
  /// One row per iteration: xi after the HMC move and the kernel draw.
  MatrixXd xi_samples;
  MatrixXd alpha_samples;
  double acceptance_rate = 0.0;
  Index rejected_nonfinite = 0;
  EpochCounter epochs;
};

/// Alternates an HMC move of xi | alpha with a kernel draw of alpha | xi.
/// An empty kernel leaves alpha fixed.
HmcRun hmc_within_gibbs(const TargetModel& model, const GibbsKernel& kernel, const VectorXd& xi0,
                        const VectorXd& alpha0, const HmcConfig& cfg);

struct HmcPilot {
  double step_size;
  Index n_leapfrog;
  double acceptance_rate;
  double ess_per_epoch;
  bool in_window;
};

struct HmcTuning {
  HmcConfig config;
  /// Set when no grid point landed within the acceptance window.
  bool flagged = false;
  std::vector<HmcPilot> pilots;
};

struct HmcTuningOptions {
  double target_acceptance = 0.651;
  double window = 0.1;
  Index pilot_iterations = 2000;
  std::uint64_t seed = 0;
};

/// Pilot-runs every (step_size, n_leapfrog) pair, discards the first half of
/// each pilot, and picks the in-window config with the highest ESS per epoch
/// of the slowest coordinate; falls back to the acceptance rate nearest the
/// target and flags the result.
HmcTuning tune_hmc(const TargetModel& model, const GibbsKernel& kernel, const VectorXd& xi0, const VectorXd& alpha0,
                   const std::vector<std::pair<double, Index>>& grid, const HmcTuningOptions& options = {});

}  // namespace gzz
