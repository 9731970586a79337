#pragma once

#include <cmath>
#include <limits>

namespace gzz {

/// Affine envelope s -> intercept + max(slope, 0) * s for a switching rate
/// along the current ray. Units: events per unit process time.
template <typename Scalar>
struct AffineRateBoundT {
  Scalar intercept{0};
  Scalar slope{0};

  Scalar effective_slope() const { return slope > Scalar(0) ? slope : Scalar(0); }
  Scalar operator()(Scalar s) const { return intercept + effective_slope() * s; }
  /// Integral of the envelope over [0, s].
  Scalar integral(Scalar s) const { return intercept * s + Scalar(0.5) * effective_slope() * s * s; }
};

using AffineRateBound = AffineRateBoundT<double>;

/// First arrival time of a Poisson process with the envelope as intensity,
/// given an Exponential(1) variate. Returns +infinity when the envelope is
/// identically zero.
template <typename Scalar>
Scalar first_arrival_affine(const AffineRateBoundT<Scalar>& bound, Scalar exp_draw) {
  using std::sqrt;
  const Scalar a = bound.intercept;
  const Scalar b = bound.effective_slope();
  if (b <= Scalar(0)) {
    if (a <= Scalar(0)) return std::numeric_limits<Scalar>::infinity();
    return exp_draw / a;
  }
  // (-a + sqrt(a^2 + 2bE)) / b, rewritten to avoid cancellation when a^2 >> bE.
  return Scalar(2) * exp_draw / (a + sqrt(a * a + Scalar(2) * b * exp_draw));
}

}  // namespace gzz
