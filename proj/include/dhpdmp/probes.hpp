#ifndef DHPDMP_PROBES_HPP
#define DHPDMP_PROBES_HPP

#include <functional>
#include <string>
#include <vector>

#include "dhpdmp/coupling.hpp"
#include "dhpdmp/model.hpp"
#include "dhpdmp/random.hpp"

namespace dhpdmp {

/// Test function f(x, v) for generator probes. Missing gradients fall back
/// to central differences with step 1e-5.
struct TestFunction {
  using Fn = std::function<double(const Vector& x, const Vector& v)>;
  using Grad = std::function<Vector(const Vector& x, const Vector& v)>;

  std::string name;
  Fn f;
  Grad grad_x;
  Grad grad_v;

  double operator()(const Vector& x, const Vector& v) const { return f(x, v); }
  Vector gx(const Vector& x, const Vector& v) const;
  Vector gv(const Vector& x, const Vector& v) const;
};

TestFunction zero_function();
TestFunction constant_function(double c);
/// a f + b g
TestFunction linear_combination(double a, const TestFunction& f, double b, const TestFunction& g);

/// Coordinate functions, Gaussians in |v|^2 and |x|^2 + |v|^2, x1 v1, sin v1, cos(x1 + v1).
std::vector<TestFunction> standard_battery();

/// L f(x, v) = <grad_x f, v> - <grad_v f, gamma v + grad U(x)> + J(x,v) E[f(x,u) - f(x,v)], u ~ phi.
Estimate generator_probe(const TestFunction& f, const State& point, const ModelSpec& model, std::size_t n_mc,
                         Stream& stream);

struct ProbeResidual {
  double coupled = 0.0;   // coupled generator applied to g (+) h
  double marginal = 0.0;  // L g(x,v) + L h(x',v')
  double residual = 0.0;
  double se = 0.0;        // standard error of the residual
  /// The 1e-12 floor absorbs round-off when both sides agree sample by sample.
  bool passes(double k = 3.0) const { return std::abs(residual) <= k * se + 1e-12; }
};

/// Coupled generator of g(x,v) + h(x',v') against the sum of single-chain
/// generators. The common branch is integrated with u ~ phi and the exact
/// split weight min(1, phi(u+xi)/phi(u)) between basic and reflection; the
/// single-chain terms reuse the same draws, so the residual is a paired
/// difference whose standard error is estimated directly.
ProbeResidual coupling_operator_probe(const TestFunction& g, const TestFunction& h, const CoupledState& pair,
                                      const ModelSpec& model, const CouplingKnobs& knobs, std::size_t n_mc,
                                      Stream& stream);

}  // namespace dhpdmp

#endif  // DHPDMP_PROBES_HPP
