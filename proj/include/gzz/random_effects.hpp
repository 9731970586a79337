#pragma once

#include <Eigen/Core>

#include "gzz/model.hpp"

namespace gzz {

struct RandomEffectsHyperpriors {
  double a_phi = 1.0;
  double b_phi = 1.0;
  double a_sigma = 1.0;
  double b_sigma = 1.0;
  /// true: sigma^2 | - ~ IG(a_sigma + 3/2, ...); false: IG(a_sigma + p/2, ...),
  /// the shape implied by p independent N(0, sigma^2) coefficients.
  bool strict_paper_conditionals = true;
};

/// Grouped binary data: covariates X (N x p), responses y, group ids in [0, K).
struct GroupedData {
  MatrixXd X;
  VectorXd y;
  Eigen::VectorXi group;
  Index n_groups = 0;

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }
  void validate() const;
};

/// Logistic random-effects model psi_ij = m + beta_j + X_ij^T upsilon with
/// m, beta_j ~ N(0, 1/phi), upsilon_l ~ N(0, sigma^2), phi ~ Ga(a_phi, b_phi),
/// sigma^2 ~ IG(a_sigma, b_sigma).
///
/// Layout: xi = (upsilon_1..upsilon_p, m, beta_1..beta_K), alpha = (phi, sigma^2).
class RandomEffectsModel : public LogisticModel {
 public:
  RandomEffectsModel(const GroupedData& data, RandomEffectsHyperpriors hyper);

  Index hyper_dim() const override { return 2; }
  double prior_precision(const VectorXd& alpha, Index i) const override;

  Index n_covariates() const { return n_covariates_; }
  Index n_groups() const { return n_groups_; }
  Index intercept_index() const { return n_covariates_; }
  Index effect_index(Index k) const { return n_covariates_ + 1 + k; }

  const RandomEffectsHyperpriors& hyperpriors() const { return hyper_; }
  /// Prior means phi = a_phi/b_phi and sigma^2 = b_sigma/(a_sigma - 1) when finite.
  VectorXd default_alpha() const;
  GibbsKernel kernel() const;

  /// Augmented design with columns ordered as xi.
  static LogisticData augment(const GroupedData& data);

 private:
  Index n_covariates_;
  Index n_groups_;
  RandomEffectsHyperpriors hyper_;
};

/// One exact draw of (phi, sigma^2) given xi:
///   phi     ~ Ga(a_phi + (K+1)/2, b_phi + m^2/2 + 1/2 sum_j beta_j^2)   (rate)
///   sigma^2 ~ IG(a_sigma + c, b_sigma + 1/2 sum_l upsilon_l^2)        (scale)
/// with c = 3/2 (strict) or p/2.
VectorXd random_effects_gibbs(const VectorXd& xi, const VectorXd& alpha, Index n_covariates, Index n_groups,
                              const RandomEffectsHyperpriors& hyper, RandomStream& rng);

/// Shape and rate/scale of the two conditionals above, exposed for testing.
struct RandomEffectsConditionals {
  double phi_shape;
  double phi_rate;
  double sigma_shape;
  double sigma_scale;
};
RandomEffectsConditionals random_effects_conditionals(const VectorXd& xi, Index n_covariates, Index n_groups,
                                                      const RandomEffectsHyperpriors& hyper);

}  // namespace gzz
