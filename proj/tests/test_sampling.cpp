#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "gzz/diagnostics.hpp"
#include "gzz/model.hpp"
#include "gzz/random_effects.hpp"
#include "gzz/samplers.hpp"
#include "gzz/spike_slab.hpp"
#include "gzz/subsampling.hpp"
#include "gzz/synthetic.hpp"
#include "support.hpp"

using namespace gzz;

namespace {

// Calls fn on every size-B subset of [0, n).
void for_each_subset(Index n, Index B, const std::function<void(const std::vector<Index>&)>& fn) {
  std::vector<Index> idx(static_cast<std::size_t>(B));
  std::iota(idx.begin(), idx.end(), Index{0});
  while (true) {
    fn(idx);
    Index k = B - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == n - B + k) --k;
    if (k < 0) return;
    ++idx[static_cast<std::size_t>(k)];
    for (Index m = k + 1; m < B; ++m) idx[static_cast<std::size_t>(m)] = idx[static_cast<std::size_t>(m - 1)] + 1;
  }
}

double binomial(Index n, Index k) {
  double r = 1.0;
  for (Index i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

RandomEffectsModel tiny_random_effects(std::uint64_t seed) {
  const auto truth = default_random_effects_truth(2, 2, 1.0, seed);
  return RandomEffectsModel(generate_random_effects_data(3, 2, 0.3, truth, seed), {});
}

SpikeSlabModel tiny_spike_slab(std::uint64_t seed) {
  return SpikeSlabModel(generate_logistic_data(5, 0.2, default_logistic_truth(2, 1.0, seed), seed), {});
}

StartState start_for(const TargetModel& m, const VectorXd& alpha) {
  return {VectorXd::Zero(m.dim()), VectorXd::Ones(m.dim()), alpha};
}

}  // namespace

TEST(Subsampling, EnumeratedBatchesAreUnbiased) {
  const RandomEffectsModel m = tiny_random_effects(1);
  ASSERT_EQ(m.n_data(), 6);
  RandomStream rng(3, StreamTag::kData);
  VectorXd alpha(2);
  alpha << 1.3, 0.7;
  for (int trial = 0; trial < 5; ++trial) {
    VectorXd xi(m.dim());
    for (Index i = 0; i < m.dim(); ++i) xi[i] = rng.normal();
    const VectorXd exact = m.gradient(xi, alpha);
    for (Index B = 1; B <= 6; ++B) {
      SubsampleEstimator est(m, B);
      for (Index i = 0; i < m.dim(); ++i) {
        double sum = 0.0;
        for_each_subset(6, B, [&](const std::vector<Index>& J) { sum += est.estimate(xi, alpha, i, J); });
        EXPECT_NEAR(sum / binomial(6, B), exact[i], 1e-12 * std::max(1.0, std::abs(exact[i])));
      }
    }
  }
}

TEST(Subsampling, EnvelopeDominatesEveryBatch) {
  // Exhaustive over batches, for a grid of times along the ray.
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const RandomEffectsModel re = tiny_random_effects(seed);
    const SpikeSlabModel ss = tiny_spike_slab(seed);
    for (const LogisticModel* m : {static_cast<const LogisticModel*>(&re), static_cast<const LogisticModel*>(&ss)}) {
      const Index n = m->n_data();
      ASSERT_LE(n, 6);
      RandomStream rng(seed, StreamTag::kData);
      VectorXd alpha = m == &re ? re.default_alpha() : ss.default_alpha();
      for (int trial = 0; trial < 4; ++trial) {
        VectorXd xi(m->dim());
        VectorXd theta(m->dim());
        for (Index i = 0; i < m->dim(); ++i) {
          xi[i] = 2.0 * rng.normal();
          theta[i] = rng.bernoulli(0.5) ? 1.0 : -1.0;
        }
        for (Index B = 1; B <= n; ++B) {
          SubsampleEstimator est(*m, B);
          for (Index i = 0; i < m->dim(); ++i) {
            const AffineRateBound bound = m->envelope(xi, theta, alpha, i);
            for (double s : {0.0, 0.05, 0.3, 1.0, 2.5, 7.0}) {
              const VectorXd at = xi + s * theta;
              for_each_subset(n, B, [&](const std::vector<Index>& J) {
                const double rate = std::max(0.0, theta[i] * est.estimate(at, alpha, i, J));
                ASSERT_LE(rate, bound(s) * (1.0 + 1e-12) + 1e-12) << "B=" << B << " i=" << i << " s=" << s;
              });
            }
          }
        }
      }
    }
  }
}

TEST(Subsampling, BatchesAreDistinctAndUniform) {
  const RandomEffectsModel m = tiny_random_effects(2);
  SubsampleEstimator est(m, 2);
  RandomStream rng(4, StreamTag::kThinning);
  std::vector<Index> batch;
  std::map<std::pair<Index, Index>, double> counts;
  const int draws = 30000;
  for (int k = 0; k < draws; ++k) {
    est.draw_batch(rng, batch);
    ASSERT_EQ(batch.size(), 2u);
    ASSERT_NE(batch[0], batch[1]);
    counts[{std::min(batch[0], batch[1]), std::max(batch[0], batch[1])}] += 1.0;
  }
  ASSERT_EQ(counts.size(), 15u);
  std::vector<double> obs;
  for (auto& [k, c] : counts) obs.push_back(c);
  EXPECT_GT(stats::chi_square_pvalue(obs, std::vector<double>(15, draws / 15.0)), 0.01);
}

TEST(Subsampling, ValidatesBatchSizeAndCharges) {
  const RandomEffectsModel m = tiny_random_effects(3);
  EXPECT_THROW(SubsampleEstimator(m, 7), std::invalid_argument);
  EXPECT_THROW(SubsampleEstimator(m, -1), std::invalid_argument);
  SubsampleEstimator full(m, 0);
  EXPECT_TRUE(full.full_batch());
  EpochCounter c = make_epoch_counter(m);
  RandomStream rng(1, StreamTag::kThinning);
  const VectorXd xi = VectorXd::Zero(m.dim());
  const VectorXd theta = VectorXd::Ones(m.dim());
  SubsampleEstimator three(m, 3);
  three.rate_arg(xi, theta, m.default_alpha(), 0, rng, c);
  full.rate_arg(xi, theta, m.default_alpha(), 0, rng, c);
  EXPECT_EQ(c.grad_point_evals, 9);
  EXPECT_DOUBLE_EQ(epoch_report(c), 1.5);
  EXPECT_NEAR(full.rate_arg(xi, theta, m.default_alpha(), 1, rng, c), m.gradient(xi, m.default_alpha())[1], 1e-12);
}

// ---------------------------------------------------------------------------

TEST(Samplers, SeedDeterminismIsBitExact) {
  const RandomEffectsModel m = tiny_random_effects(4);
  GzzConfig cfg;
  cfg.zz.horizon = 200.0;
  cfg.zz.seed = 77;
  cfg.zz.batch_size = 2;
  cfg.eta = 0.5;
  const PdmpRun a = run_gzz(m, m.kernel(), start_for(m, m.default_alpha()), cfg);
  const PdmpRun b = run_gzz(m, m.kernel(), start_for(m, m.default_alpha()), cfg);
  ASSERT_EQ(a.skeleton.size(), b.skeleton.size());
  for (std::size_t k = 0; k < a.skeleton.size(); ++k) {
    ASSERT_EQ(a.skeleton[k].t, b.skeleton[k].t);
    ASSERT_EQ(a.skeleton[k].xi, b.skeleton[k].xi);
    ASSERT_EQ(a.skeleton[k].alpha, b.skeleton[k].alpha);
  }
  EXPECT_EQ(a.epochs.grad_point_evals, b.epochs.grad_point_evals);
  cfg.zz.seed = 78;
  const PdmpRun c = run_gzz(m, m.kernel(), start_for(m, m.default_alpha()), cfg);
  EXPECT_NE(c.skeleton[1].t, a.skeleton[1].t);
}

TEST(Samplers, StreamingMatchesStoredSkeleton) {
  const SpikeSlabModel m = tiny_spike_slab(5);
  GzzConfig cfg;
  cfg.zz.horizon = 300.0;
  cfg.zz.seed = 3;
  cfg.zz.batch_size = 1;
  cfg.eta = 1.0;
  const PdmpRun run = run_gzz(m, m.kernel(), start_for(m, m.default_alpha()), cfg);
  GridRecorder grid(0.5, 30.0, cfg.zz.horizon, m.dim());
  const PdmpStats stats = run_gzz(m, m.kernel(), start_for(m, m.default_alpha()), cfg, grid);
  EXPECT_EQ(stats.epochs.grad_point_evals, run.epochs.grad_point_evals);
  const DiscretizedChain direct = discretize(run.skeleton, 0.5, 30.0);
  ASSERT_EQ(direct.samples.rows(), grid.chain().samples.rows());
  EXPECT_LE((direct.samples - grid.chain().samples).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(static_cast<double>(run.epochs.grad_point_evals - grid.evals_at_t0()) / m.n_data(),
              run.epochs_after(30.0), 1e-12);
}

TEST(Samplers, FullBatchEqualsExplicitBatchOfN) {
  const RandomEffectsModel m = tiny_random_effects(6);
  GzzConfig cfg;
  cfg.zz.horizon = 100.0;
  cfg.zz.seed = 5;
  cfg.eta = 0.3;
  cfg.zz.batch_size = 0;
  const PdmpRun a = run_gzz(m, m.kernel(), start_for(m, m.default_alpha()), cfg);
  cfg.zz.batch_size = m.n_data();
  const PdmpRun b = run_gzz(m, m.kernel(), start_for(m, m.default_alpha()), cfg);
  ASSERT_EQ(a.skeleton.size(), b.skeleton.size());
  for (std::size_t k = 0; k < a.skeleton.size(); ++k) ASSERT_EQ(a.skeleton[k].t, b.skeleton[k].t);
}

TEST(Samplers, ZeroEtaNeverTouchesAlpha) {
  const RandomEffectsModel m = tiny_random_effects(7);
  const PdmpRun run = run_zigzag(m, m.default_alpha(), VectorXd::Zero(m.dim()), VectorXd::Ones(m.dim()),
                                 {VectorXd(), 200.0, 9, 3, 0});
  EXPECT_EQ(run.hyper_events, 0);
  for (const auto& e : run.skeleton.events()) EXPECT_EQ(e.alpha, m.default_alpha());
  EXPECT_EQ(run.skeleton.events().back().kind, EventKind::kEnd);
  EXPECT_DOUBLE_EQ(run.skeleton.final_time(), 200.0);
}

TEST(Samplers, HyperEventRateMatchesEta) {
  FixedGaussianModel m(VectorXd::Ones(2), 1);
  const GibbsKernel kernel = [](const VectorXd&, const VectorXd& a, RandomStream& rng) {
    VectorXd next = a;
    next[0] = rng.uniform();
    return next;
  };
  GzzConfig cfg;
  cfg.zz.horizon = 5000.0;
  cfg.zz.seed = 12;
  cfg.eta = 0.8;
  const PdmpRun run = run_gzz(m, kernel, {VectorXd::Zero(2), VectorXd::Ones(2), VectorXd::Constant(1, 0.5)}, cfg);
  const auto check = hyper_update_counterfactual_check(run.skeleton);
  EXPECT_TRUE(check.consistent_with(0.8)) << check.rate;
  EXPECT_FALSE(check.consistent_with(0.6));
  EXPECT_EQ(check.hyper_events, run.hyper_events);
  EXPECT_EQ(check.bounce_events, run.bounces);
}

TEST(Samplers, MaxEventsStopsEarly) {
  FixedGaussianModel m(VectorXd::Ones(1));
  ZigZagConfig cfg{VectorXd(), 1e9, 1, 0, 1};
  const PdmpRun run = run_zigzag(m, VectorXd(), VectorXd::Zero(1), VectorXd::Ones(1), cfg);
  ASSERT_EQ(run.skeleton.size(), 2u);
  EXPECT_EQ(run.skeleton[1].kind, EventKind::kBounce);
}

namespace {

// Claims an envelope a tenth of the true one.
class BrokenEnvelope final : public GaussianPriorModel {
 public:
  Index dim() const override { return 1; }
  Index hyper_dim() const override { return 0; }
  double prior_precision(const VectorXd&, Index) const override { return 1.0; }
  AffineRateBound envelope(const VectorXd& xi, const VectorXd& theta, const VectorXd& alpha,
                           Index i) const override {
    AffineRateBound b = GaussianPriorModel::envelope(xi, theta, alpha, i);
    b.intercept = 0.1 * b.intercept + 0.01;
    b.slope *= 0.1;
    return b;
  }
};

}  // namespace

TEST(Samplers, EnvelopeViolationAborts) {
  BrokenEnvelope m;
  ZigZagConfig cfg{VectorXd(), 1000.0, 1, 0, 0};
  EXPECT_THROW(run_zigzag(m, VectorXd(), VectorXd::Zero(1), VectorXd::Ones(1), cfg), EnvelopeViolation);
}

TEST(Samplers, KernelFailureCarriesEventIndex) {
  FixedGaussianModel m(VectorXd::Ones(1), 1);
  const GibbsKernel bad = [](const VectorXd&, const VectorXd&, RandomStream&) -> VectorXd {
    throw std::runtime_error("boom");
  };
  GzzConfig cfg;
  cfg.zz.horizon = 1000.0;
  cfg.eta = 1.0;
  try {
    run_gzz(m, bad, {VectorXd::Zero(1), VectorXd::Ones(1), VectorXd::Ones(1)}, cfg);
    FAIL() << "expected KernelFailure";
  } catch (const KernelFailure& e) {
    EXPECT_GE(e.event_index, 1u);
  }
}

TEST(Samplers, RejectsBadConfigs) {
  FixedGaussianModel m(VectorXd::Ones(2));
  const StartState s{VectorXd::Zero(2), VectorXd::Ones(2), VectorXd()};
  GzzConfig cfg;
  cfg.eta = 0.0;
  cfg.zz.horizon = -1.0;
  EXPECT_THROW(run_gzz(m, {}, s, cfg), std::invalid_argument);
  cfg.zz.horizon = 1.0;
  cfg.eta = 1.0;
  EXPECT_THROW(run_gzz(m, {}, s, cfg), std::invalid_argument);
  cfg.eta = 0.0;
  cfg.zz.refresh_gamma = VectorXd::Constant(2, -1.0);
  EXPECT_THROW(run_gzz(m, {}, s, cfg), std::invalid_argument);
  cfg.zz.refresh_gamma = VectorXd();
  EXPECT_THROW(run_gzz(m, {}, {VectorXd::Zero(3), VectorXd::Ones(3), VectorXd()}, cfg), std::invalid_argument);
}

TEST(Samplers, ZigZagGaussianMoments) {
  FixedGaussianModel m(VectorXd::Constant(2, 4.0));
  ZigZagConfig cfg{VectorXd::Constant(2, 0.5), 2e4, 21, 0, 0};
  const PdmpRun run = run_zigzag(m, VectorXd(), VectorXd::Zero(2), VectorXd::Ones(2), cfg);
  for (Index c = 0; c < 2; ++c) {
    EXPECT_NEAR(trajectory_moment(run.skeleton, c, 1), 0.0, 0.03);
    EXPECT_NEAR(trajectory_moment(run.skeleton, c, 2), 0.25, 0.02);
  }
}
