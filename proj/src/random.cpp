#include "gzz/random.hpp"

#include <cmath>

namespace gzz {

namespace {

std::seed_seq make_seed_seq(std::uint64_t master, StreamTag tag, std::uint64_t index) {
  const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  return std::seed_seq{lo(master), hi(master), static_cast<std::uint32_t>(tag), lo(index), hi(index)};
}

}  // namespace

RandomStream::RandomStream(std::uint64_t master_seed, StreamTag tag, std::uint64_t index) {
  auto seq = make_seed_seq(master_seed, tag, index);
  engine_.seed(seq);
}

double RandomStream::uniform() {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  double u = 0.0;
  do {
    u = dist(engine_);
  } while (u <= 0.0);
  return u;
}

double RandomStream::exponential() { return -std::log(uniform()); }

double RandomStream::normal() {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

double RandomStream::gamma(double shape, double rate) {
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(engine_);
}

double RandomStream::inv_gamma(double shape, double scale) { return 1.0 / gamma(shape, scale); }

double RandomStream::beta(double a, double b) {
  const double x = gamma(a, 1.0);
  const double y = gamma(b, 1.0);
  return x / (x + y);
}

bool RandomStream::bernoulli(double p) { return uniform() < p; }

Eigen::Index RandomStream::index(Eigen::Index n) {
  std::uniform_int_distribution<Eigen::Index> dist(0, n - 1);
  return dist(engine_);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replica) {
  RandomStream stream(master, StreamTag::kReplica, replica);
  return stream.engine()();
}

}  // namespace gzz
