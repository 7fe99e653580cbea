#ifndef DHPDMP_DISTANCE_HPP
#define DHPDMP_DISTANCE_HPP

#include <algorithm>
#include <cmath>

#include "dhpdmp/lyapunov.hpp"
#include "dhpdmp/params.hpp"
#include "dhpdmp/types.hpp"

namespace dhpdmp {

/// f(s) = (1 - exp(-a0 s)) / a0: increasing, concave, f(0) = 0, f(inf) = 1/a0.
inline double distance_f(double s, double a0) {
  require(a0 > 0.0, "distance_f: a0 must be > 0");
  return -std::expm1(-a0 * s) / a0;
}

inline double distance_f_prime(double s, double a0) { return std::exp(-a0 * s); }

/// r = alpha0 |z| + |q|, q = z + w / alpha.
inline double distance_r(const CoupledState& pair, const CouplingParams& p) {
  return pair.r(p.alpha, p.alpha0);
}

/// f(min(r, R0)) (1 + eps W(x,v) + eps W(x',v')).
inline double functional_FG(const CoupledState& pair, const CouplingParams& p, const LyapunovFunction& w) {
  const double r = distance_r(pair, p);
  if (r == 0.0) return 0.0;
  return distance_f(std::min(r, p.R0), p.a0) * (1.0 + p.epsilon * (w(pair.first) + w(pair.second)));
}

/// ((|z| + |w|) ^ 1) (W(x,v) + W(x',v')).
inline double semi_metric_Phi(const CoupledState& pair, const LyapunovFunction& w) {
  const double gap = std::min((pair.first.x - pair.second.x).norm() + (pair.first.v - pair.second.v).norm(), 1.0);
  if (gap == 0.0) return 0.0;
  return gap * (w(pair.first) + w(pair.second));
}

}  // namespace dhpdmp

#endif  // DHPDMP_DISTANCE_HPP
