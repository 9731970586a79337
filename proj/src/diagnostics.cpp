#include "gzz/diagnostics.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace gzz {

double trajectory_moment(const Skeleton& sk, Index coord, int power, double t0) {
  if (power != 1 && power != 2) throw DiagnosticsError("power must be 1 or 2");
  const Index p = sk.dim();
  if (coord < 0 || coord >= p + sk.hyper_dim()) throw DiagnosticsError("coordinate out of range");
  const double t_end = sk.final_time();
  if (!(t_end > t0)) throw DiagnosticsError("zero-length trajectory");

  const auto& ev = sk.events();
  double total = 0.0;
  for (std::size_t k = sk.segment_index(t0); k + 1 < ev.size(); ++k) {
    const double a = std::max(ev[k].t, t0);
    const double h = ev[k + 1].t - a;
    if (coord >= p) {
      const double v = ev[k].alpha[coord - p];
      total += h * (power == 1 ? v : v * v);
      continue;
    }
    const double x0 = ev[k].xi[coord] + ev[k].theta[coord] * (a - ev[k].t);
    const double v = ev[k].theta[coord];
    if (power == 1) {
      total += x0 * h + 0.5 * v * h * h;
    } else {
      total += x0 * x0 * h + x0 * v * h * h + v * v * h * h * h / 3.0;
    }
  }
  return total / (t_end - t0);
}

DiscretizedChain discretize(const Skeleton& sk, double dt, double t0) {
  if (!(dt > 0.0)) throw DiagnosticsError("dt must be positive");
  if (t0 < 0.0 || t0 > sk.final_time()) throw DiagnosticsError("t0 outside the trajectory");
  const auto steps = static_cast<Index>(std::floor((sk.final_time() - t0) / dt)) + 1;
  DiscretizedChain chain{dt, t0, MatrixXd(steps, sk.dim())};
  const auto& ev = sk.events();
  std::size_t k = sk.segment_index(t0);
  for (Index s = 0; s < steps; ++s) {
    const double t = t0 + static_cast<double>(s) * dt;
    while (k + 1 < ev.size() && ev[k + 1].t <= t) ++k;
    chain.samples.row(s) = (ev[k].xi + ev[k].theta * (t - ev[k].t)).transpose();
  }
  return chain;
}

GridRecorder::GridRecorder(double dt, double t0, double horizon, Index p) {
  if (!(dt > 0.0)) throw DiagnosticsError("dt must be positive");
  if (t0 < 0.0 || t0 > horizon) throw DiagnosticsError("t0 outside the trajectory");
  const auto steps = static_cast<Index>(std::floor((horizon - t0) / dt)) + 1;
  chain_ = DiscretizedChain{dt, t0, MatrixXd(steps, p)};
}

void GridRecorder::fill_until(double t_end, bool inclusive) {
  while (next_ < chain_.samples.rows()) {
    const double t = chain_.t0 + static_cast<double>(next_) * chain_.dt;
    if (t > t_end || (!inclusive && t == t_end)) break;
    chain_.samples.row(next_) = (last_.xi + last_.theta * (t - last_.t)).transpose();
    ++next_;
  }
}

void GridRecorder::record(const SkeletonEvent& event, std::int64_t evals) {
  if (started_) {
    fill_until(event.t, false);
    if (last_.t <= chain_.t0 && chain_.t0 < event.t) evals_at_t0_ = last_evals_;
  }
  last_ = event;
  last_evals_ = evals;
  started_ = true;
  if (event.kind == EventKind::kEnd) {
    fill_until(event.t, true);
    chain_.samples.conservativeResize(next_, Eigen::NoChange);
  }
}

double iact(const Eigen::Ref<const VectorXd>& series) {
  const Index n = series.size();
  if (n < 100) throw DiagnosticsError("IACT needs at least 100 samples");
  const VectorXd centred = series.array() - series.mean();
  const double c0 = centred.squaredNorm() / static_cast<double>(n);
  if (!(c0 > 0.0)) throw DiagnosticsError("constant chain has no autocorrelation time");

  std::size_t m = 1;
  while (m < static_cast<std::size_t>(2 * n)) m <<= 1;
  std::vector<double> padded(m, 0.0);
  for (Index i = 0; i < n; ++i) padded[static_cast<std::size_t>(i)] = centred[i];
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, padded);
  for (auto& z : spectrum) z = std::norm(z);
  std::vector<double> acov;
  fft.inv(acov, spectrum);

  const auto rho = [&](Index k) { return acov[static_cast<std::size_t>(k)] / static_cast<double>(n) / c0; };
  double sum = 0.0;
  for (Index k = 0; k + 1 < n; k += 2) {
    const double pair = rho(k) + rho(k + 1);
    if (!(pair > 0.0)) break;
    sum += pair;
  }
  const double tau = -1.0 + 2.0 * sum;
  return std::max(tau, 1.0 / std::log10(static_cast<double>(n)));
}

double iact(const DiscretizedChain& chain, Index coord) { return iact(chain.samples.col(coord)); }

EfficiencySummary efficiency_summary(const MatrixXd& samples, double epochs, double dt) {
  if (!(epochs > 0.0)) throw DiagnosticsError("epochs must be positive");
  const Index d = samples.cols();
  EfficiencySummary s;
  s.dt = dt;
  s.epochs = epochs;
  s.iact.resize(d);
  for (Index c = 0; c < d; ++c) s.iact[c] = iact(samples.col(c));
  s.ess = static_cast<double>(samples.rows()) / s.iact.array();
  s.ess_per_epoch = s.ess / epochs;
  s.iact.maxCoeff(&s.slowest_coordinate);
  return s;
}

EfficiencySummary efficiency_summary(const DiscretizedChain& chain, double epochs) {
  return efficiency_summary(chain.samples, epochs, chain.dt);
}

EfficiencySummary efficiency_summary(const Skeleton& sk, double epochs, double dt, double t0) {
  if (dt <= 0.0) dt = (sk.final_time() - t0) / 1e4;
  return efficiency_summary(discretize(sk, dt, t0), epochs);
}

nlohmann::json to_json(const EfficiencySummary& s) {
  const auto vec = [](const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return {{"iact", vec(s.iact)},
          {"ess", vec(s.ess)},
          {"ess_per_epoch", vec(s.ess_per_epoch)},
          {"slowest_coordinate", s.slowest_coordinate + 1},
          {"dt", s.dt},
          {"epochs", s.epochs}};
}

}  // namespace gzz
