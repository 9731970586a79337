#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <gtest/gtest.h>

#include "gzz/random.hpp"
#include "gzz/rate_bound.hpp"
#include "gzz/skeleton.hpp"
#include "support.hpp"

using namespace gzz;

namespace {

// Root of integral(s) = E by bracketing, independent of the closed form.
double arrival_by_root(const AffineRateBound& b, double e) {
  double hi = 1.0;
  while (b.integral(hi) < e) hi *= 2.0;
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve([&](double s) { return b.integral(s) - e; }, 0.0, hi,
                                                   boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Index>(v.size()));
  Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

}  // namespace

TEST(RateBound, FirstArrivalMatchesWorkedExample) {
  // a = 1, b = 2, E = 4: s + s^2 = 4
  EXPECT_DOUBLE_EQ(first_arrival_affine(AffineRateBound{1.0, 2.0}, 4.0), (std::sqrt(17.0) - 1.0) / 2.0);
  EXPECT_NEAR(first_arrival_affine(AffineRateBound{1.0, 2.0}, 4.0), arrival_by_root({1.0, 2.0}, 4.0), 1e-12);
}

TEST(RateBound, FirstArrivalAgreesWithRootFinder) {
  RandomStream rng(11, StreamTag::kData);
  for (int k = 0; k < 500; ++k) {
    const AffineRateBound b{rng.exponential() * 3.0, rng.normal() * 5.0};
    const double e = rng.exponential();
    const double tau = first_arrival_affine(b, e);
    if (b.intercept == 0.0 && b.effective_slope() == 0.0) continue;
    EXPECT_NEAR(tau, arrival_by_root(b, e), 1e-9 * std::max(1.0, tau)) << b.intercept << " " << b.slope;
    EXPECT_NEAR(b.integral(tau), e, 1e-10 * std::max(1.0, e));
  }
}

TEST(RateBound, DegenerateEnvelopes) {
  EXPECT_DOUBLE_EQ(first_arrival_affine(AffineRateBound{2.0, -1.0}, 3.0), 1.5);
  EXPECT_TRUE(std::isinf(first_arrival_affine(AffineRateBound{0.0, 0.0}, 1.0)));
  EXPECT_TRUE(std::isinf(first_arrival_affine(AffineRateBound{0.0, -4.0}, 1.0)));
  EXPECT_DOUBLE_EQ(first_arrival_affine(AffineRateBound{0.0, 1.0}, 2.0), 2.0);
}

TEST(RateBound, NoCancellationForHugeIntercept) {
  const AffineRateBound b{1e8, 1e-8};
  const double tau = first_arrival_affine(b, 1.0);
  EXPECT_NEAR(tau, 1e-8, 1e-20);
  EXPECT_GT(tau, 0.0);
}

TEST(RateBound, WorksWithLongDouble) {
  const AffineRateBoundT<long double> b{1.0L, 2.0L};
  EXPECT_NEAR(static_cast<double>(first_arrival_affine(b, 4.0L)), (std::sqrt(17.0) - 1.0) / 2.0, 1e-15);
}

// ---------------------------------------------------------------------------

TEST(Random, StreamsAreReproducible) {
  RandomStream a(42, StreamTag::kThinning, 3);
  RandomStream b(42, StreamTag::kThinning, 3);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(a.engine()(), b.engine()());
}

TEST(Random, StreamsDifferAcrossTagsAndIndices) {
  std::set<std::uint64_t> first;
  for (auto tag : {StreamTag::kThinning, StreamTag::kEtaClock, StreamTag::kKernel, StreamTag::kData}) {
    for (std::uint64_t i = 0; i < 4; ++i) first.insert(RandomStream(1, tag, i).engine()());
  }
  EXPECT_EQ(first.size(), 16u);
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(Random, UniformIsOpen) {
  RandomStream rng(5, StreamTag::kData);
  for (int k = 0; k < 100000; ++k) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Random, GammaAndInverseGammaLaws) {
  RandomStream rng(6, StreamTag::kData);
  std::vector<double> g;
  std::vector<double> ig;
  for (int k = 0; k < 20000; ++k) {
    g.push_back(rng.gamma(2.5, 4.0));
    ig.push_back(rng.inv_gamma(3.0, 2.0));
  }
  boost::math::gamma_distribution<> gd(2.5, 0.25);
  EXPECT_GT(stats::ks_pvalue(g, [&](double x) { return boost::math::cdf(gd, x); }), 0.01);
  // 1/X ~ Gamma(shape, rate = scale)
  boost::math::gamma_distribution<> igd(3.0, 1.0 / 2.0);
  EXPECT_GT(stats::ks_pvalue(ig, [&](double x) { return boost::math::cdf(boost::math::complement(igd, 1.0 / x)); }),
            0.01);
}

TEST(Random, BetaAndIndexLaws) {
  RandomStream rng(7, StreamTag::kData);
  std::vector<double> b;
  for (int k = 0; k < 20000; ++k) b.push_back(rng.beta(2.0, 5.0));
  boost::math::beta_distribution<> bd(2.0, 5.0);
  EXPECT_GT(stats::ks_pvalue(b, [&](double x) { return boost::math::cdf(bd, x); }), 0.01);

  std::vector<double> counts(7, 0.0);
  for (int k = 0; k < 70000; ++k) counts[static_cast<std::size_t>(rng.index(7))] += 1.0;
  EXPECT_GT(stats::chi_square_pvalue(counts, std::vector<double>(7, 10000.0)), 0.01);
}

// ---------------------------------------------------------------------------

TEST(Skeleton, InterpolatesWithHalfOpenSegments) {
  Skeleton sk(vec({0.0, 1.0}), vec({1.0, -1.0}), vec({2.0}));
  sk.append({1.0, vec({1.0, 0.0}), vec({-1.0, -1.0}), vec({2.0}), EventKind::kBounce});
  sk.append({3.0, vec({-1.0, -2.0}), vec({-1.0, -1.0}), vec({5.0}), EventKind::kHyper});
  sk.append({4.0, vec({-2.0, -3.0}), vec({-1.0, -1.0}), vec({5.0}), EventKind::kEnd});

  const auto mid = sk.position_at(0.5);
  EXPECT_DOUBLE_EQ(mid.xi[0], 0.5);
  EXPECT_DOUBLE_EQ(mid.xi[1], 0.5);
  const auto at_event = sk.position_at(1.0);
  EXPECT_DOUBLE_EQ(at_event.theta[0], -1.0);
  const auto at_hyper = sk.position_at(3.0);
  EXPECT_DOUBLE_EQ(at_hyper.alpha[0], 5.0);
  EXPECT_DOUBLE_EQ(sk.position_at(2.999).alpha[0], 2.0);
  EXPECT_DOUBLE_EQ(sk.position_at(4.0).xi[0], -2.0);
  EXPECT_EQ(sk.segment_index(0.0), 0u);
  EXPECT_EQ(sk.segment_index(1.0), 1u);
  EXPECT_THROW(sk.position_at(4.5), std::out_of_range);
  EXPECT_THROW(sk.position_at(-0.1), std::out_of_range);
}

TEST(Skeleton, RejectsInconsistentEvents) {
  Skeleton sk(vec({0.0}), vec({1.0}), vec({1.0}));
  EXPECT_THROW(sk.append({0.0, vec({0.0}), vec({-1.0}), vec({1.0}), EventKind::kBounce}), SkeletonError);
  EXPECT_THROW(sk.append({1.0, vec({0.7}), vec({-1.0}), vec({1.0}), EventKind::kBounce}), SkeletonError);
  EXPECT_THROW(sk.append({1.0, vec({1.0}), vec({-1.0}), vec({3.0}), EventKind::kBounce}), SkeletonError);
  EXPECT_THROW(sk.append({1.0, vec({1.0}), vec({0.5}), vec({1.0}), EventKind::kBounce}), SkeletonError);
  EXPECT_THROW(sk.append({1.0, vec({1.0, 0.0}), vec({-1.0, 1.0}), vec({1.0}), EventKind::kBounce}), SkeletonError);
  EXPECT_NO_THROW(sk.append({1.0, vec({1.0}), vec({-1.0}), vec({1.0}), EventKind::kBounce}));
  EXPECT_EQ(sk.size(), 2u);
}

TEST(Skeleton, RejectsTwoFlipsAtOnce) {
  Skeleton sk(vec({0.0, 0.0}), vec({1.0, 1.0}), VectorXd());
  EXPECT_THROW(sk.append({1.0, vec({1.0, 1.0}), vec({-1.0, -1.0}), VectorXd(), EventKind::kBounce}), SkeletonError);
}

TEST(Skeleton, CsvRoundTripIsExact) {
  Skeleton sk(vec({0.1, -0.3}), vec({1.0, -1.0}), vec({0.7, 1.0 / 3.0}));
  sk.append({0.123456789, vec({0.1 + 0.123456789, -0.3 - 0.123456789}), vec({-1.0, -1.0}), vec({0.7, 1.0 / 3.0}),
             EventKind::kBounce});
  const double t2 = 1.0 / 7.0 + 0.5;
  const double h = t2 - 0.123456789;
  sk.append({t2, vec({0.1 + 0.123456789 - h, -0.3 - 0.123456789 - h}), vec({-1.0, -1.0}), vec({2.5, 1e-7}),
             EventKind::kHyper});
  const double h2 = 0.25;
  sk.append({t2 + h2, vec({0.1 + 0.123456789 - h - h2, -0.3 - 0.123456789 - h - h2}), vec({-1.0, -1.0}),
             vec({2.5, 1e-7}), EventKind::kEnd});

  std::stringstream ss;
  write_skeleton_csv(ss, sk);
  const std::string header = ss.str().substr(0, ss.str().find('\n'));
  EXPECT_EQ(header, "t,xi_1,xi_2,theta_1,theta_2,alpha_1,alpha_2");
  const Skeleton back = read_skeleton_csv(ss);
  ASSERT_EQ(back.size(), sk.size());
  for (std::size_t k = 0; k < sk.size(); ++k) {
    EXPECT_EQ(back[k].t, sk[k].t);
    EXPECT_EQ(back[k].xi, sk[k].xi);
    EXPECT_EQ(back[k].theta, sk[k].theta);
    EXPECT_EQ(back[k].alpha, sk[k].alpha);
    EXPECT_EQ(back[k].kind, sk[k].kind);
  }
}

TEST(Skeleton, CsvReaderRejectsGarbage) {
  std::stringstream bad("t,xi_1,theta_1\n0,0,1\n1,0.5,1\n");
  EXPECT_THROW(read_skeleton_csv(bad), SkeletonError);
  std::stringstream short_row("t,xi_1,theta_1\n0,0\n");
  EXPECT_THROW(read_skeleton_csv(short_row), SkeletonError);
}
