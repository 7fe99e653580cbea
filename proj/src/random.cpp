#include "dhpdmp/random.hpp"

#include <cmath>

namespace dhpdmp {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {
std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}
}  // namespace

Stream::Stream(std::uint64_t seed, std::uint64_t index)
    : seed_(seed), id_(mix(seed, index)), engine_(id_) {}

Stream Stream::split(std::uint64_t index) const {
  Stream s(seed_, 0);
  s.id_ = mix(id_, index);
  s.engine_.seed(s.id_);
  return s;
}

double Stream::exponential(double rate) {
  return -std::log1p(-uniform()) / rate;
}

double Stream::gamma(double shape) {
  std::gamma_distribution<double> g(shape, 1.0);
  return g(engine_);
}

Vector Stream::direction(Eigen::Index d) {
  Vector u(d);
  if (d == 1) {
    u(0) = uniform() < 0.5 ? -1.0 : 1.0;
    return u;
  }
  double n2 = 0.0;
  do {
    for (Eigen::Index i = 0; i < d; ++i) u(i) = normal();
    n2 = u.squaredNorm();
  } while (n2 == 0.0);
  return u / std::sqrt(n2);
}

}  // namespace dhpdmp
