#include "gzz/spike_slab.hpp"

#include <cmath>
#include <stdexcept>

namespace gzz {

LogisticData SpikeSlabModel::augment(const LogisticData& data) {
  data.validate();
  LogisticData out;
  out.X.resize(data.n(), data.p() + 1);
  out.X.col(0).setOnes();
  out.X.rightCols(data.p()) = data.X;
  out.y = data.y;
  return out;
}

SpikeSlabModel::SpikeSlabModel(const LogisticData& data, SpikeSlabHyperpriors hyper)
    : LogisticModel(augment(data)), n_covariates_(data.p()), hyper_(hyper) {}

double SpikeSlabModel::prior_precision(const VectorXd& alpha, Index i) const {
  if (i == 0) return 1.0 / hyper_.sigma0_sq;
  const SpikeSlabLayout at{n_covariates_};
  const double tau2 = alpha[at.tau2(i - 1)];
  return alpha[at.gamma(i - 1)] != 0.0 ? 1.0 / (alpha[at.nu()] * tau2) : 1.0 / tau2;
}

VectorXd SpikeSlabModel::default_alpha() const {
  const SpikeSlabLayout at{n_covariates_};
  VectorXd alpha(hyper_dim());
  alpha.head(n_covariates_).setOnes();
  alpha.segment(n_covariates_, n_covariates_)
      .setConstant(hyper_.a_tau > 1.0 ? hyper_.b_tau / (hyper_.a_tau - 1.0) : 1.0);
  alpha[at.pi()] = hyper_.a_pi / (hyper_.a_pi + hyper_.b_pi);
  alpha[at.nu()] = hyper_.a_nu > 1.0 ? hyper_.b_nu / (hyper_.a_nu - 1.0) : 1.0;
  return alpha;
}

GibbsKernel SpikeSlabModel::kernel() const {
  return [hyper = hyper_](const VectorXd& xi, const VectorXd& alpha, RandomStream& rng) {
    return spike_slab_gibbs(xi, alpha, hyper, rng);
  };
}

double spike_slab_inclusion_probability(double upsilon, double tau2, double pi, double nu) {
  const double u2 = upsilon * upsilon;
  const double log_slab = std::log(pi) - 0.5 * std::log(nu) - u2 / (2.0 * nu * tau2);
  const double log_spike = std::log1p(-pi) - u2 / (2.0 * tau2);
  return 1.0 / (1.0 + std::exp(log_spike - log_slab));
}

InvGammaParams spike_slab_tau2_conditional(double upsilon, bool gamma, double nu,
                                           const SpikeSlabHyperpriors& hyper) {
  const double u2 = upsilon * upsilon;
  return {hyper.a_tau + 0.5, hyper.b_tau + (gamma ? u2 / (2.0 * nu) : u2 / 2.0)};
}

InvGammaParams spike_slab_nu_conditional(const VectorXd& upsilon, const VectorXd& gamma, const VectorXd& tau2,
                                         const SpikeSlabHyperpriors& hyper) {
  return {hyper.a_nu + 0.5 * gamma.sum(),
          hyper.b_nu + 0.5 * (gamma.array() * upsilon.array().square() / tau2.array()).sum()};
}

BetaParams spike_slab_pi_conditional(const VectorXd& gamma, const SpikeSlabHyperpriors& hyper) {
  const double included = gamma.sum();
  return {hyper.a_pi + included, hyper.b_pi + static_cast<double>(gamma.size()) - included};
}

VectorXd spike_slab_gibbs(const VectorXd& xi, const VectorXd& alpha, const SpikeSlabHyperpriors& hyper,
                          RandomStream& rng) {
  const Index p = xi.size() - 1;
  if (alpha.size() != 2 * p + 2) throw std::invalid_argument("spike-and-slab alpha has the wrong size");
  const SpikeSlabLayout at{p};
  const VectorXd upsilon = xi.tail(p);
  VectorXd next = alpha;

  for (Index i = 0; i < p; ++i) {
    const double prob = spike_slab_inclusion_probability(upsilon[i], next[at.tau2(i)], next[at.pi()], next[at.nu()]);
    next[at.gamma(i)] = rng.bernoulli(prob) ? 1.0 : 0.0;
  }
  for (Index i = 0; i < p; ++i) {
    const auto c = spike_slab_tau2_conditional(upsilon[i], next[at.gamma(i)] != 0.0, next[at.nu()], hyper);
    next[at.tau2(i)] = rng.inv_gamma(c.shape, c.scale);
  }
  {
    const auto c = spike_slab_nu_conditional(upsilon, next.head(p), next.segment(p, p), hyper);
    next[at.nu()] = rng.inv_gamma(c.shape, c.scale);
  }
  {
    const auto c = spike_slab_pi_conditional(next.head(p), hyper);
    next[at.pi()] = rng.beta(c.a, c.b);
  }
  return next;
}

}  // namespace gzz
