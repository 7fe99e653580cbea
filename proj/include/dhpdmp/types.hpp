#ifndef DHPDMP_TYPES_HPP
#define DHPDMP_TYPES_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dhpdmp {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Vector = VectorX<double>;

/// Thrown on precondition violations (bad dimensions, non-finite input,
/// out-of-range parameters).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an operation is asked for a case it does not support
/// (e.g. the closed-form beta solver on a custom potential).
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& a) {
  return a.allFinite();
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

/// A point (x, v) of position-velocity space.
template <typename Scalar>
struct PhaseState {
  VectorX<Scalar> x;
  VectorX<Scalar> v;

  PhaseState() = default;
  PhaseState(VectorX<Scalar> x_, VectorX<Scalar> v_)
      : x(std::move(x_)), v(std::move(v_)) {
    require(x.size() == v.size() && x.size() >= 1,
            "PhaseState: x and v must share a dimension d >= 1");
    require(all_finite(x) && all_finite(v), "PhaseState: non-finite entry");
  }

  static PhaseState zero(Eigen::Index d) {
    return PhaseState(VectorX<Scalar>::Zero(d), VectorX<Scalar>::Zero(d));
  }

  Eigen::Index dim() const { return x.size(); }

  bool operator==(const PhaseState& o) const {
    return x.size() == o.x.size() && (x.array() == o.x.array()).all() &&
           (v.array() == o.v.array()).all();
  }
};

using State = PhaseState<double>;

/// Pair of phase states. z, w, q are derived on demand, never cached.
struct CoupledState {
  State first;
  State second;

  CoupledState() = default;
  CoupledState(State a, State b) : first(std::move(a)), second(std::move(b)) {
    require(first.dim() == second.dim(), "CoupledState: dimension mismatch");
  }

  Eigen::Index dim() const { return first.dim(); }
  Vector z() const { return first.x - second.x; }
  Vector w() const { return first.v - second.v; }
  /// q = z + w / alpha
  Vector q(double alpha) const { return z() + w() / alpha; }
  /// r = alpha0 |z| + |q|
  double r(double alpha, double alpha0) const {
    return alpha0 * z().norm() + q(alpha).norm();
  }
  bool coalesced() const { return first == second; }
};

/// Monte Carlo estimate with its standard error.
struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

}  // namespace dhpdmp

#endif  // DHPDMP_TYPES_HPP
