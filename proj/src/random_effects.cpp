#include "gzz/random_effects.hpp"

#include <limits>
#include <stdexcept>

namespace gzz {

void GroupedData::validate() const {
  if (X.rows() != y.size() || group.size() != y.size()) throw std::invalid_argument("grouped data sizes differ");
  if (n_groups < 1) throw std::invalid_argument("at least one group required");
  if ((group.array() < 0).any() || (group.array() >= n_groups).any()) {
    throw std::invalid_argument("group id out of range");
  }
}

LogisticData RandomEffectsModel::augment(const GroupedData& data) {
  data.validate();
  const Index p = data.p();
  LogisticData out;
  out.X.setZero(data.n(), p + 1 + data.n_groups);
  out.X.leftCols(p) = data.X;
  out.X.col(p).setOnes();
  for (Index r = 0; r < data.n(); ++r) out.X(r, p + 1 + data.group[r]) = 1.0;
  out.y = data.y;
  return out;
}

RandomEffectsModel::RandomEffectsModel(const GroupedData& data, RandomEffectsHyperpriors hyper)
    : LogisticModel(augment(data)), n_covariates_(data.p()), n_groups_(data.n_groups), hyper_(hyper) {}

double RandomEffectsModel::prior_precision(const VectorXd& alpha, Index i) const {
  return i < n_covariates_ ? 1.0 / alpha[1] : alpha[0];
}

VectorXd RandomEffectsModel::default_alpha() const {
  VectorXd alpha(2);
  alpha[0] = hyper_.a_phi / hyper_.b_phi;
  alpha[1] = hyper_.a_sigma > 1.0 ? hyper_.b_sigma / (hyper_.a_sigma - 1.0) : 1.0;
  return alpha;
}

GibbsKernel RandomEffectsModel::kernel() const {
  return [p = n_covariates_, k = n_groups_, hyper = hyper_](const VectorXd& xi, const VectorXd& alpha,
                                                            RandomStream& rng) {
    return random_effects_gibbs(xi, alpha, p, k, hyper, rng);
  };
}

RandomEffectsConditionals random_effects_conditionals(const VectorXd& xi, Index n_covariates, Index n_groups,
                                                      const RandomEffectsHyperpriors& hyper) {
  const double m = xi[n_covariates];
  const double beta_sq = xi.segment(n_covariates + 1, n_groups).squaredNorm();
  const double upsilon_sq = xi.head(n_covariates).squaredNorm();
  const double sigma_shift = hyper.strict_paper_conditionals ? 1.5 : 0.5 * static_cast<double>(n_covariates);
  return {hyper.a_phi + 0.5 * static_cast<double>(n_groups + 1), hyper.b_phi + 0.5 * m * m + 0.5 * beta_sq,
          hyper.a_sigma + sigma_shift, hyper.b_sigma + 0.5 * upsilon_sq};
}

VectorXd random_effects_gibbs(const VectorXd& xi, const VectorXd& /*alpha*/, Index n_covariates, Index n_groups,
                              const RandomEffectsHyperpriors& hyper, RandomStream& rng) {
  const auto c = random_effects_conditionals(xi, n_covariates, n_groups, hyper);
  VectorXd next(2);
  next[0] = rng.gamma(c.phi_shape, c.phi_rate);
  next[1] = rng.inv_gamma(c.sigma_shape, c.sigma_scale);
  return next;
}

}  // namespace gzz
