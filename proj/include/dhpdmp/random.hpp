#ifndef DHPDMP_RANDOM_HPP
#define DHPDMP_RANDOM_HPP

#include <cstdint>
#include <random>

#include "dhpdmp/types.hpp"

namespace dhpdmp {

/// Deterministic random stream. Streams for ensembles are derived from
/// (master seed, index) so results do not depend on scheduling.
class Stream {
 public:
  explicit Stream(std::uint64_t seed, std::uint64_t index = 0);

  /// Child stream; same (seed, path) always yields the same draws.
  Stream split(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t id() const { return id_; }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Exponential with the given rate.
  double exponential(double rate);
  double normal() { return normal_(engine_); }
  double gamma(double shape);
  /// Uniform direction on the unit sphere of R^d.
  Vector direction(Eigen::Index d);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace dhpdmp

#endif  // DHPDMP_RANDOM_HPP
