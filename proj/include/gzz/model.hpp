#pragma once

#include <cmath>
#include <functional>

#include <Eigen/Core>

#include "gzz/random.hpp"
#include "gzz/rate_bound.hpp"

namespace gzz {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Potential U(xi, alpha) = U0(xi, alpha) + sum_j U^j(xi) over a parameter
/// block xi (length p) and a hyperparameter block alpha (length r).
///
/// Models without a data decomposition report n_data() == 0; their whole
/// xi-gradient lives in prior_partial.
class TargetModel {
 public:
  virtual ~TargetModel() = default;

  virtual Index dim() const = 0;
  virtual Index hyper_dim() const = 0;
  virtual Index n_data() const = 0;

  /// d U0 / d xi_i.
  virtual double prior_partial(const VectorXd& xi, const VectorXd& alpha, Index i) const = 0;
  /// d U^j / d xi_i.
  virtual double data_partial(const VectorXd& xi, Index j, Index i) const = 0;

  /// Affine bound on (theta_i G_i(xi + s theta))^+ for s >= 0, valid for every
  /// mini-batch estimate G_i of d U / d xi_i.
  virtual AffineRateBound envelope(const VectorXd& xi, const VectorXd& theta, const VectorXd& alpha,
                                   Index i) const = 0;

  /// The xi-dependent part of U (additive constants in xi dropped).
  virtual double potential(const VectorXd& xi, const VectorXd& alpha) const = 0;
  /// Full gradient of U with respect to xi.
  virtual VectorXd gradient(const VectorXd& xi, const VectorXd& alpha) const;
};

/// Markov kernel on alpha leaving pi(d alpha | xi) invariant.
using GibbsKernel = std::function<VectorXd(const VectorXd& xi, const VectorXd& alpha, RandomStream& rng)>;

/// Models whose U0 is a centred Gaussian in xi given alpha:
/// U0 = 1/2 sum_i precision_i(alpha) xi_i^2 + (terms in alpha only).
class GaussianPriorModel : public TargetModel {
 public:
  virtual double prior_precision(const VectorXd& alpha, Index i) const = 0;

  double prior_partial(const VectorXd& xi, const VectorXd& alpha, Index i) const override;
  AffineRateBound envelope(const VectorXd& xi, const VectorXd& theta, const VectorXd& alpha,
                           Index i) const override;
  double potential(const VectorXd& xi, const VectorXd& alpha) const override;
  VectorXd gradient(const VectorXd& xi, const VectorXd& alpha) const override;

  Index n_data() const override { return 0; }
  double data_partial(const VectorXd&, Index, Index) const override { return 0.0; }
};

/// Independent Gaussian coordinates with fixed precisions; alpha is inert.
class FixedGaussianModel : public GaussianPriorModel {
 public:
  explicit FixedGaussianModel(VectorXd precisions, Index hyper_dim = 0);

  Index dim() const override { return precisions_.size(); }
  Index hyper_dim() const override { return hyper_dim_; }
  double prior_precision(const VectorXd&, Index i) const override { return precisions_[i]; }

 private:
  VectorXd precisions_;
  Index hyper_dim_;
};

/// xi_i | alpha ~ N(0, 1/alpha) i.i.d., alpha ~ Gamma(shape, rate).
/// alpha | xi ~ Gamma(shape + p/2, rate + |xi|^2/2); xi is marginally
/// Student-t with 2*shape degrees of freedom.
class GaussianGammaModel : public GaussianPriorModel {
 public:
  GaussianGammaModel(Index p, double shape, double rate);

  Index dim() const override { return p_; }
  Index hyper_dim() const override { return 1; }
  double prior_precision(const VectorXd& alpha, Index) const override { return alpha[0]; }

  double shape() const { return shape_; }
  double rate() const { return rate_; }

  VectorXd draw_conditional(const VectorXd& xi, RandomStream& rng) const;
  GibbsKernel kernel() const;

 private:
  Index p_;
  double shape_;
  double rate_;
};

// ---------------------------------------------------------------------------
// Logistic likelihood

/// Design matrix (already augmented with intercept/indicator columns when the
/// model calls for them) and binary responses.
struct LogisticData {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> X;
  VectorXd y;

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }
  void validate() const;
};

inline double logistic(double psi) { return 1.0 / (1.0 + std::exp(-psi)); }

/// d/d xi_i of -log f(Y_j | xi) = X_ji (sigma(psi_j) - Y_j).
double logistic_grad_point(const LogisticData& data, const VectorXd& xi, Index j, Index i);

/// Logistic likelihood with a conditionally Gaussian prior on xi.
class LogisticModel : public GaussianPriorModel {
 public:
  explicit LogisticModel(LogisticData data);

  Index dim() const override { return data_.p(); }
  Index n_data() const override { return data_.n(); }
  double data_partial(const VectorXd& xi, Index j, Index i) const override;
  AffineRateBound envelope(const VectorXd& xi, const VectorXd& theta, const VectorXd& alpha,
                           Index i) const override;
  double potential(const VectorXd& xi, const VectorXd& alpha) const override;
  VectorXd gradient(const VectorXd& xi, const VectorXd& alpha) const override;

  const LogisticData& data() const { return data_; }
  /// n * max_j |X_ji|: global bound on any mini-batch likelihood estimate.
  double likelihood_bound(Index i) const { return likelihood_bound_[i]; }

 private:
  LogisticData data_;
  VectorXd likelihood_bound_;
};

/// Logistic regression with fixed Gaussian prior precisions (no hyperparameters).
class FixedPriorLogisticModel : public LogisticModel {
 public:
  FixedPriorLogisticModel(LogisticData data, VectorXd precisions);

  Index hyper_dim() const override { return 0; }
  double prior_precision(const VectorXd&, Index i) const override { return precisions_[i]; }

 private:
  VectorXd precisions_;
};

}  // namespace gzz
