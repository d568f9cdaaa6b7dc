#pragma once

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace rmq {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// A seeded random stream. Streams for parallel runs are derived from
/// (master_seed, index) so results do not depend on how runs are scheduled.
/// A stream must not be shared between threads.
class RandomStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RandomStream(std::uint64_t seed);

  static RandomStream derive(std::uint64_t master_seed, std::uint64_t index);

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

  double normal() { return normal_(engine_); }
  /// Uniform on the open interval (0, 1).
  double uniform();
  std::uint64_t bits() { return engine_(); }

  engine_type& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  engine_type engine_;
  boost::random::normal_distribution<double> normal_;
  boost::random::uniform_01<double> uniform_;
};

}  // namespace rmq
