#ifndef DHPDMP_FLOW_HPP
#define DHPDMP_FLOW_HPP

#include "dhpdmp/model.hpp"
#include "dhpdmp/types.hpp"

namespace dhpdmp {

/// Scalar propagator of x'' + gamma x' + 2 theta x = 0 over time t:
///   x(t) = a x0 + b v0,  v(t) = c x0 + e v0.
/// Written via cosh/sinh (over-damped), cos/sin (under-damped) or the
/// repeated-root limit, so it stays accurate across critical damping.
template <typename Scalar>
struct OscillatorPropagator {
  Scalar a, b, c, e;

  static OscillatorPropagator make(Scalar gamma, Scalar theta, Scalar t) {
    using std::abs, std::cos, std::cosh, std::exp, std::sin, std::sinh, std::sqrt;
    const Scalar mu = -gamma / Scalar(2);
    // sigma = (gamma^2 - 8 theta) / 4
    Scalar sigma = (gamma * gamma - Scalar(8) * theta) / Scalar(4);
    if (abs(gamma * gamma - Scalar(8) * theta) < Scalar(1e-12) * gamma * gamma) sigma = Scalar(0);
    // k = e^{mu t} C(t), h = e^{mu t} S(t) with C' = sigma S, S' = C.
    Scalar k, h;
    if (sigma > Scalar(0)) {
      const Scalar eta = sqrt(sigma);
      if (eta * t < Scalar(0.5)) {
        const Scalar em = exp(mu * t);
        k = em * cosh(eta * t);
        h = em * sinh(eta * t) / eta;
      } else {
        const Scalar ep = exp((mu + eta) * t);
        const Scalar en = exp((mu - eta) * t);
        k = (ep + en) / Scalar(2);
        h = (ep - en) / (Scalar(2) * eta);
      }
    } else if (sigma < Scalar(0)) {
      const Scalar omega = sqrt(-sigma);
      const Scalar em = exp(mu * t);
      k = em * cos(omega * t);
      h = em * sin(omega * t) / omega;
    } else {
      const Scalar em = exp(mu * t);
      k = em;
      h = em * t;
    }
    OscillatorPropagator p;
    p.a = k - mu * h;
    p.b = h;
    p.c = sigma * h - mu * mu * h;  // mu k + sigma h - mu (mu h + k)
    p.e = mu * h + k;
    return p;
  }
};

class FlowIntegrator {
 public:
  enum class Method { exact_quadratic, rk4 };

  /// Closed-form flow; requires a quadratic potential.
  static FlowIntegrator exact(double gamma, const PotentialModel& potential);
  /// Fixed-step RK4; step <= 0 selects the default step.
  static FlowIntegrator rk4(double gamma, const PotentialModel& potential, double step = 0.0);
  /// Exact when the potential is quadratic, RK4 with the default step otherwise.
  static FlowIntegrator for_model(const ModelSpec& model);

  static double default_step(double gamma, const PotentialModel& potential);

  Method method() const { return method_; }
  double gamma() const { return gamma_; }
  double step() const { return step_; }
  const PotentialModel& potential() const { return potential_; }

  /// Advances x' = v, v' = -gamma v - grad U(x) by dt >= 0.
  State flow(const State& s, double dt) const;
  /// In-place variant used in the simulation hot loops.
  void advance(Vector& x, Vector& v, double dt) const;

  /// H = U(x) + |v|^2 / 2
  double hamiltonian(const State& s) const;

 private:
  FlowIntegrator(Method m, double gamma, PotentialModel p, double step)
      : method_(m), gamma_(gamma), potential_(std::move(p)), step_(step) {}

  Method method_;
  double gamma_;
  PotentialModel potential_;
  double step_;
};

/// Synchronous flow of both components by the same dt.
CoupledState coupled_flow(const FlowIntegrator& flow, const CoupledState& pair, double dt);

}  // namespace dhpdmp

#endif  // DHPDMP_FLOW_HPP
