#include <cmath>
#include <stdexcept>

#include "gzz/model.hpp"

namespace gzz {

namespace {

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

VectorXd TargetModel::gradient(const VectorXd& xi, const VectorXd& alpha) const {
  VectorXd g(dim());
  for (Index i = 0; i < dim(); ++i) {
    g[i] = prior_partial(xi, alpha, i);
    for (Index j = 0; j < n_data(); ++j) g[i] += data_partial(xi, j, i);
  }
  return g;
}

// ---------------------------------------------------------------------------

double GaussianPriorModel::prior_partial(const VectorXd& xi, const VectorXd& alpha, Index i) const {
  return prior_precision(alpha, i) * xi[i];
}

AffineRateBound GaussianPriorModel::envelope(const VectorXd& xi, const VectorXd& theta,
                                             const VectorXd& alpha, Index i) const {
  // theta_i * v * (xi_i + s theta_i) = theta_i v xi_i + v s
  const double v = prior_precision(alpha, i);
  return {positive_part(theta[i] * v * xi[i]), v};
}

double GaussianPriorModel::potential(const VectorXd& xi, const VectorXd& alpha) const {
  double u = 0.0;
  for (Index i = 0; i < dim(); ++i) u += 0.5 * prior_precision(alpha, i) * xi[i] * xi[i];
  return u;
}

VectorXd GaussianPriorModel::gradient(const VectorXd& xi, const VectorXd& alpha) const {
  VectorXd g(dim());
  for (Index i = 0; i < dim(); ++i) g[i] = prior_precision(alpha, i) * xi[i];
  return g;
}

FixedGaussianModel::FixedGaussianModel(VectorXd precisions, Index hyper_dim)
    : precisions_(std::move(precisions)), hyper_dim_(hyper_dim) {
  if ((precisions_.array() < 0.0).any()) throw std::invalid_argument("precisions must be nonnegative");
}

GaussianGammaModel::GaussianGammaModel(Index p, double shape, double rate) : p_(p), shape_(shape), rate_(rate) {
  if (p < 1 || !(shape > 0.0) || !(rate > 0.0)) throw std::invalid_argument("invalid Gaussian-Gamma model");
}

VectorXd GaussianGammaModel::draw_conditional(const VectorXd& xi, RandomStream& rng) const {
  VectorXd alpha(1);
  alpha[0] = rng.gamma(shape_ + 0.5 * static_cast<double>(p_), rate_ + 0.5 * xi.squaredNorm());
  return alpha;
}

GibbsKernel GaussianGammaModel::kernel() const {
  return [this](const VectorXd& xi, const VectorXd&, RandomStream& rng) { return draw_conditional(xi, rng); };
}

// ---------------------------------------------------------------------------

void LogisticData::validate() const {
  if (X.rows() != y.size()) throw std::invalid_argument("design rows and responses differ");
  if (((y.array() != 0.0) && (y.array() != 1.0)).any()) throw std::invalid_argument("responses must be 0 or 1");
}

double logistic_grad_point(const LogisticData& data, const VectorXd& xi, Index j, Index i) {
  const double x = data.X(j, i);
  if (x == 0.0) return 0.0;
  const double psi = data.X.row(j).dot(xi);
  return x * (logistic(psi) - data.y[j]);
}

LogisticModel::LogisticModel(LogisticData data) : data_(std::move(data)) {
  data_.validate();
  likelihood_bound_ = static_cast<double>(data_.n()) * data_.X.cwiseAbs().colwise().maxCoeff().transpose();
}

double LogisticModel::data_partial(const VectorXd& xi, Index j, Index i) const {
  return logistic_grad_point(data_, xi, j, i);
}

AffineRateBound LogisticModel::envelope(const VectorXd& xi, const VectorXd& theta, const VectorXd& alpha,
                                        Index i) const {
  AffineRateBound bound = GaussianPriorModel::envelope(xi, theta, alpha, i);
  bound.intercept += likelihood_bound_[i];
  return bound;
}

double LogisticModel::potential(const VectorXd& xi, const VectorXd& alpha) const {
  const VectorXd psi = data_.X * xi;
  double u = GaussianPriorModel::potential(xi, alpha);
  for (Index j = 0; j < data_.n(); ++j) u += softplus(psi[j]) - data_.y[j] * psi[j];
  return u;
}

VectorXd LogisticModel::gradient(const VectorXd& xi, const VectorXd& alpha) const {
  const VectorXd psi = data_.X * xi;
  const VectorXd residual = psi.unaryExpr([](double v) { return logistic(v); }) - data_.y;
  return GaussianPriorModel::gradient(xi, alpha) + data_.X.transpose() * residual;
}

FixedPriorLogisticModel::FixedPriorLogisticModel(LogisticData data, VectorXd precisions)
    : LogisticModel(std::move(data)), precisions_(std::move(precisions)) {
  if (precisions_.size() != dim()) throw std::invalid_argument("one precision per coefficient required");
}

}  // namespace gzz
