#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "gzz/skeleton.hpp"

namespace gzz::stats {

// Asymptotic Kolmogorov survival function P(sqrt(n) D > x).
inline double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

// Small-sample corrected (Stephens) p-value.
inline double ks_pvalue(const std::vector<double>& xs, const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(xs.size());
  const double d = ks_statistic(xs, cdf);
  const double sn = std::sqrt(n);
  return kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
}

inline double chi_square_pvalue(const std::vector<double>& observed, const std::vector<double>& expected,
                                int lost_dof = 1) {
  double stat = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const double diff = observed[k] - expected[k];
    stat += diff * diff / expected[k];
  }
  boost::math::chi_squared dist(static_cast<double>(static_cast<int>(observed.size()) - lost_dof));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

inline double relative_error(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

// Midpoint Riemann sum of coordinate^power over [t0, T], about `steps` cells.
// The partition is cut at hyperparameter jumps so step coordinates have no cell straddling a jump.
inline double riemann_moment(const Skeleton& sk, Index coord, int power, double t0, int steps) {
  std::vector<double> cuts{t0};
  for (std::size_t k = 0; k < sk.size(); ++k)
    if (sk[k].kind == EventKind::kHyper && sk[k].t > t0) cuts.push_back(sk[k].t);
  cuts.push_back(sk.final_time());
  const double span = sk.final_time() - t0;
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    const double len = cuts[j + 1] - cuts[j];
    if (len <= 0.0) continue;
    const int m = std::max(1, static_cast<int>(std::ceil(steps * len / span)));
    const double h = len / m;
    for (int k = 0; k < m; ++k) {
      const auto s = sk.position_at(cuts[j] + (k + 0.5) * h);
      const double v = coord < sk.dim() ? s.xi[coord] : s.alpha[coord - sk.dim()];
      sum += std::pow(v, power) * h;
    }
  }
  return sum / span;
}

}  // namespace gzz::stats
