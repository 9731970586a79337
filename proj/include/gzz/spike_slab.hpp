#pragma once

#include <Eigen/Core>

#include "gzz/model.hpp"

namespace gzz {

struct SpikeSlabHyperpriors {
  double a_tau = 3.0;
  double b_tau = 0.2;
  double a_nu = 3.0;
  double b_nu = 200.0;
  double a_pi = 1.0;
  double b_pi = 1.0;
  double sigma0_sq = 10.0;
};

/// Logistic regression psi_j = upsilon_0 + X_j^T upsilon with
///   upsilon_i ~ gamma_i N(0, nu tau_i^2) + (1 - gamma_i) N(0, tau_i^2),
///   gamma_i ~ Bernoulli(pi), tau_i^2 ~ IG(a_tau, b_tau), nu ~ IG(a_nu, b_nu),
///   pi ~ Beta(a_pi, b_pi), upsilon_0 ~ N(0, sigma0^2).
///
/// Layout: xi = (upsilon_0..upsilon_p),
/// alpha = (gamma_1..gamma_p, tau^2_1..tau^2_p, pi, nu).
class SpikeSlabModel : public LogisticModel {
 public:
  /// `data.X` holds the raw covariates; the intercept column is added here.
  SpikeSlabModel(const LogisticData& data, SpikeSlabHyperpriors hyper);

  Index hyper_dim() const override { return 2 * n_covariates_ + 2; }
  double prior_precision(const VectorXd& alpha, Index i) const override;

  Index n_covariates() const { return n_covariates_; }
  const SpikeSlabHyperpriors& hyperpriors() const { return hyper_; }
  VectorXd default_alpha() const;
  GibbsKernel kernel() const;

  static LogisticData augment(const LogisticData& data);

 private:
  Index n_covariates_;
  SpikeSlabHyperpriors hyper_;
};

/// Offsets into the spike-and-slab alpha vector for p covariates.
struct SpikeSlabLayout {
  Index p;
  Index gamma(Index i) const { return i; }
  Index tau2(Index i) const { return p + i; }
  Index pi() const { return 2 * p; }
  Index nu() const { return 2 * p + 1; }
};

/// P(gamma_i = 1 | upsilon_i, tau_i^2, pi, nu).
double spike_slab_inclusion_probability(double upsilon, double tau2, double pi, double nu);

/// Parameters of the remaining conditionals (inverse gamma in shape/scale).
struct InvGammaParams {
  double shape;
  double scale;
};
struct BetaParams {
  double a;
  double b;
};
InvGammaParams spike_slab_tau2_conditional(double upsilon, bool gamma, double nu,
                                           const SpikeSlabHyperpriors& hyper);
InvGammaParams spike_slab_nu_conditional(const VectorXd& upsilon, const VectorXd& gamma, const VectorXd& tau2,
                                         const SpikeSlabHyperpriors& hyper);
BetaParams spike_slab_pi_conditional(const VectorXd& gamma, const SpikeSlabHyperpriors& hyper);

/// One sweep gamma -> tau^2 -> nu -> pi, each an exact conditional draw.
/// `xi` is (upsilon_0..upsilon_p).
VectorXd spike_slab_gibbs(const VectorXd& xi, const VectorXd& alpha, const SpikeSlabHyperpriors& hyper,
                          RandomStream& rng);

}  // namespace gzz
