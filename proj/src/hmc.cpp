#include "gzz/hmc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gzz/diagnostics.hpp"

namespace gzz {

namespace {

void charge_full_pass(const TargetModel& model, EpochCounter* epochs) {
  if (epochs) epochs->charge(std::max<Index>(model.n_data(), 1));
}

}  // namespace

void HmcConfig::validate() const {
  if (!(step_size > 0.0) || n_leapfrog < 1 || n_iterations < 1) {
    throw std::invalid_argument("HMC step size, leapfrog count and iterations must be positive");
  }
}

std::pair<VectorXd, VectorXd> leapfrog(const TargetModel& model, const VectorXd& alpha, VectorXd xi,
                                       VectorXd momentum, double step_size, Index n_steps, EpochCounter* epochs) {
  VectorXd grad = model.gradient(xi, alpha);
  charge_full_pass(model, epochs);
  for (Index s = 0; s < n_steps; ++s) {
    momentum -= 0.5 * step_size * grad;
    xi += step_size * momentum;
    grad = model.gradient(xi, alpha);
    charge_full_pass(model, epochs);
    momentum -= 0.5 * step_size * grad;
  }
  return {std::move(xi), std::move(momentum)};
}

HmcRun hmc_within_gibbs(const TargetModel& model, const GibbsKernel& kernel, const VectorXd& xi0,
                        const VectorXd& alpha0, const HmcConfig& cfg) {
  cfg.validate();
  const Index p = model.dim();
  if (xi0.size() != p || alpha0.size() != model.hyper_dim()) {
    throw std::invalid_argument("start state does not match the model dimensions");
  }
  RandomStream momentum_rng(cfg.seed, StreamTag::kHmcMomentum);
  RandomStream accept_rng(cfg.seed, StreamTag::kHmcAccept);
  RandomStream kernel_rng(cfg.seed, StreamTag::kKernel);

  HmcRun run;
  run.epochs = make_epoch_counter(model);
  run.xi_samples.resize(cfg.n_iterations, p);
  run.alpha_samples.resize(cfg.n_iterations, model.hyper_dim());

  VectorXd xi = xi0;
  VectorXd alpha = alpha0;
  Index accepted = 0;
  VectorXd momentum(p);
  for (Index it = 0; it < cfg.n_iterations; ++it) {
    for (Index i = 0; i < p; ++i) momentum[i] = momentum_rng.normal();
    const double h0 = model.potential(xi, alpha) + 0.5 * momentum.squaredNorm();
    charge_full_pass(model, &run.epochs);
    auto [xi_new, r_new] = leapfrog(model, alpha, xi, momentum, cfg.step_size, cfg.n_leapfrog, &run.epochs);
    const double h1 = model.potential(xi_new, alpha) + 0.5 * r_new.squaredNorm();
    charge_full_pass(model, &run.epochs);

    const double u = accept_rng.uniform();
    if (!std::isfinite(h1)) {
      ++run.rejected_nonfinite;
    } else if (std::log(u) < h0 - h1) {
      xi = std::move(xi_new);
      ++accepted;
    }
    if (kernel) alpha = kernel(xi, alpha, kernel_rng);
    run.xi_samples.row(it) = xi.transpose();
    run.alpha_samples.row(it) = alpha.transpose();
  }
  run.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(cfg.n_iterations);
  return run;
}

HmcTuning tune_hmc(const TargetModel& model, const GibbsKernel& kernel, const VectorXd& xi0, const VectorXd& alpha0,
                   const std::vector<std::pair<double, Index>>& grid, const HmcTuningOptions& options) {
  if (grid.empty()) throw std::invalid_argument("HMC tuning grid is empty");
  HmcTuning result;
  const Index kept = options.pilot_iterations - options.pilot_iterations / 2;

  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto [step, leap] = grid[g];
    HmcConfig cfg{step, leap, options.pilot_iterations, derive_seed(options.seed, g)};
    const HmcRun run = hmc_within_gibbs(model, kernel, xi0, alpha0, cfg);
    const MatrixXd tail = run.xi_samples.bottomRows(kept);
    // Per-iteration cost is constant, so the kept half used a proportional share.
    const double epochs = epoch_report(run.epochs) * static_cast<double>(kept) /
                          static_cast<double>(options.pilot_iterations);
    double ess_per_epoch = 0.0;
    try {
      ess_per_epoch = efficiency_summary(tail, epochs, 1.0).ess_per_epoch.minCoeff();
    } catch (const std::exception&) {
      ess_per_epoch = 0.0;  // frozen chain
    }
    const bool in_window = std::abs(run.acceptance_rate - options.target_acceptance) <= options.window;
    result.pilots.push_back({step, leap, run.acceptance_rate, ess_per_epoch, in_window});
  }

  const HmcPilot* best = nullptr;
  for (const auto& pilot : result.pilots) {
    if (pilot.in_window && (!best || pilot.ess_per_epoch > best->ess_per_epoch)) best = &pilot;
  }
  if (!best) {
    result.flagged = true;
    for (const auto& pilot : result.pilots) {
      if (!best || std::abs(pilot.acceptance_rate - options.target_acceptance) <
                       std::abs(best->acceptance_rate - options.target_acceptance)) {
        best = &pilot;
      }
    }
  }
  result.config = HmcConfig{best->step_size, best->n_leapfrog, options.pilot_iterations, options.seed};
  return result;
}

}  // namespace gzz
