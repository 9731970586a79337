#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace gzz {

/// Logical consumers of randomness. Each gets its own stream so that changing
/// the dimension or the hyperparameter rate does not reshuffle unrelated draws.
enum class StreamTag : std::uint32_t {
  kThinning = 1,  // per-coordinate candidate times, acceptance and batches
  kEtaClock = 2,
  kKernel = 3,
  kHmcMomentum = 4,
  kHmcAccept = 5,
  kData = 6,
  kStart = 7,
  kReplica = 8,
};

/// A random stream keyed by (master seed, consumer tag, index).
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, StreamTag tag, std::uint64_t index = 0);

  std::mt19937_64& engine() { return engine_; }

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Exponential(1), strictly positive.
  double exponential();
  double normal();
  /// Gamma with shape/rate parameterization.
  double gamma(double shape, double rate);
  /// Inverse gamma with shape/scale parameterization.
  double inv_gamma(double shape, double scale);
  double beta(double a, double b);
  bool bernoulli(double p);
  /// Uniform integer in [0, n).
  Eigen::Index index(Eigen::Index n);

 private:
  std::mt19937_64 engine_;
};

/// Seed for replica `replica` of an experiment with master seed `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replica);

}  // namespace gzz
