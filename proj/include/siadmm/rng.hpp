#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <boost/random/normal_distribution.hpp>

namespace siadmm {

inline constexpr std::string_view kRngFamily = "mt19937_64+boost-ziggurat+splitmix64/v2";

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t tag_hash(std::string_view tag);

// Hierarchical key: master -> experiment -> algorithm -> replication -> phase.
std::uint64_t derive_seed(std::uint64_t master, std::string_view experiment,
                          std::string_view algorithm, std::uint64_t replication,
                          std::string_view phase);

// One independent random stream. Copying a stream forks it: both copies
// produce the same future draws.
class Stream {
 public:
  explicit Stream(std::uint64_t seed = 0) : engine_(seed), seed_(seed) {}

  double normal() {
    ++draws_;
    return normal_(engine_);
  }
  double uniform(double lo, double hi) {
    ++draws_;
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }
  std::uint64_t next_u64() {
    ++draws_;
    return engine_();
  }

  // Incremented by samplers once per drawn sample xi.
  void count_sample() { ++samples_; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }
  std::uint64_t samples() const { return samples_; }

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;  // ziggurat
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::uint64_t samples_ = 0;
};

}  // namespace siadmm
