#include "dhpdmp/flow.hpp"

#include <algorithm>
#include <cmath>

namespace dhpdmp {

FlowIntegrator FlowIntegrator::exact(double gamma, const PotentialModel& potential) {
  require(gamma > 0.0 && std::isfinite(gamma), "flow: gamma must be > 0");
  if (!potential.is_quadratic()) throw InvalidArgument("exact flow needs a quadratic potential");
  return {Method::exact_quadratic, gamma, potential, 0.0};
}

FlowIntegrator FlowIntegrator::rk4(double gamma, const PotentialModel& potential, double step) {
  require(gamma > 0.0 && std::isfinite(gamma), "flow: gamma must be > 0");
  if (step <= 0.0) step = default_step(gamma, potential);
  require(std::isfinite(step), "flow: RK4 step must be finite");
  return {Method::rk4, gamma, potential, step};
}

FlowIntegrator FlowIntegrator::for_model(const ModelSpec& model) {
  if (model.potential.is_quadratic()) return exact(model.gamma, model.potential);
  return rk4(model.gamma, model.potential);
}

double FlowIntegrator::default_step(double gamma, const PotentialModel& potential) {
  const double stiffness =
      potential.is_quadratic() ? potential.theta() : 0.5 * potential.grad_lipschitz();
  return 1e-3 * std::min({1.0, 1.0 / gamma, 1.0 / std::sqrt(std::max(stiffness, 1.0))});
}

void FlowIntegrator::advance(Vector& x, Vector& v, double dt) const {
  require(dt >= 0.0 && std::isfinite(dt), "flow: dt must be finite and >= 0");
  if (dt == 0.0) return;
  if (method_ == Method::exact_quadratic) {
    const auto p = OscillatorPropagator<double>::make(gamma_, potential_.theta(), dt);
    Vector x0 = x;
    x = p.a * x0 + p.b * v;
    v = p.c * x0 + p.e * v;
    return;
  }
  auto accel = [this](const Vector& xx, const Vector& vv) -> Vector {
    return -gamma_ * vv - potential_.gradient(xx);
  };
  double remaining = dt;
  while (remaining > 0.0) {
    double h = std::min(step_, remaining);
    // land exactly on dt instead of leaving a sliver of a step
    if (remaining - h < 1e-12 * step_) h = remaining;
    const Vector k1x = v;
    const Vector k1v = accel(x, v);
    const Vector k2x = v + 0.5 * h * k1v;
    const Vector k2v = accel(x + 0.5 * h * k1x, k2x);
    const Vector k3x = v + 0.5 * h * k2v;
    const Vector k3v = accel(x + 0.5 * h * k2x, k3x);
    const Vector k4x = v + h * k3v;
    const Vector k4v = accel(x + h * k3x, k4x);
    x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    remaining -= h;
  }
}

State FlowIntegrator::flow(const State& s, double dt) const {
  State out = s;
  advance(out.x, out.v, dt);
  return out;
}

double FlowIntegrator::hamiltonian(const State& s) const {
  return potential_.value(s.x) + 0.5 * s.v.squaredNorm();
}

CoupledState coupled_flow(const FlowIntegrator& flow, const CoupledState& pair, double dt) {
  require(pair.first.dim() == pair.second.dim(), "coupled_flow: dimension mismatch");
  return {flow.flow(pair.first, dt), flow.flow(pair.second, dt)};
}

}  // namespace dhpdmp
