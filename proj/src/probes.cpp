#include "dhpdmp/probes.hpp"

#include <algorithm>
#include <cmath>

#include "dhpdmp/stats.hpp"

namespace dhpdmp {

namespace {

constexpr double kFdStep = 1e-5;

Vector central_difference(const TestFunction::Fn& f, const Vector& x, const Vector& v, bool wrt_x) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x, vp = v, vm = v;
    if (wrt_x) {
      xp[i] += kFdStep;
      xm[i] -= kFdStep;
    } else {
      vp[i] += kFdStep;
      vm[i] -= kFdStep;
    }
    g[i] = (f(xp, vp) - f(xm, vm)) / (2.0 * kFdStep);
  }
  return g;
}

double liouville(const TestFunction& f, const Vector& x, const Vector& v, const ModelSpec& model) {
  return f.gx(x, v).dot(v) - f.gv(x, v).dot(model.gamma * v + model.potential.gradient(x));
}

Vector unit(Eigen::Index d, Eigen::Index i) {
  Vector e = Vector::Zero(d);
  e[i] = 1.0;
  return e;
}

}  // namespace

Vector TestFunction::gx(const Vector& x, const Vector& v) const {
  return grad_x ? grad_x(x, v) : central_difference(f, x, v, true);
}

Vector TestFunction::gv(const Vector& x, const Vector& v) const {
  return grad_v ? grad_v(x, v) : central_difference(f, x, v, false);
}

TestFunction zero_function() { return constant_function(0.0); }

TestFunction constant_function(double c) {
  auto zero = [](const Vector& x, const Vector&) -> Vector { return Vector::Zero(x.size()); };
  return {"const", [c](const Vector&, const Vector&) { return c; }, zero, zero};
}

TestFunction linear_combination(double a, const TestFunction& f, double b, const TestFunction& g) {
  TestFunction out;
  out.name = "lin(" + f.name + "," + g.name + ")";
  out.f = [=](const Vector& x, const Vector& v) { return a * f(x, v) + b * g(x, v); };
  out.grad_x = [=](const Vector& x, const Vector& v) -> Vector { return a * f.gx(x, v) + b * g.gx(x, v); };
  out.grad_v = [=](const Vector& x, const Vector& v) -> Vector { return a * f.gv(x, v) + b * g.gv(x, v); };
  return out;
}

std::vector<TestFunction> standard_battery() {
  std::vector<TestFunction> out;
  auto zero = [](const Vector& x, const Vector&) -> Vector { return Vector::Zero(x.size()); };
  out.push_back({"v1", [](const Vector&, const Vector& v) { return v[0]; }, zero,
                 [](const Vector& x, const Vector&) -> Vector { return unit(x.size(), 0); }});
  out.push_back({"x1", [](const Vector& x, const Vector&) { return x[0]; },
                 [](const Vector& x, const Vector&) -> Vector { return unit(x.size(), 0); }, zero});
  out.push_back({"exp(-|v|^2)", [](const Vector&, const Vector& v) { return std::exp(-v.squaredNorm()); }, zero,
                 [](const Vector&, const Vector& v) -> Vector { return -2.0 * std::exp(-v.squaredNorm()) * v; }});
  out.push_back({"x1*v1", [](const Vector& x, const Vector& v) { return x[0] * v[0]; },
                 [](const Vector& x, const Vector& v) -> Vector { return v[0] * unit(x.size(), 0); },
                 [](const Vector& x, const Vector&) -> Vector { return x[0] * unit(x.size(), 0); }});
  out.push_back({"exp(-|x|^2-|v|^2)",
                 [](const Vector& x, const Vector& v) { return std::exp(-x.squaredNorm() - v.squaredNorm()); },
                 [](const Vector& x, const Vector& v) -> Vector {
                   return -2.0 * std::exp(-x.squaredNorm() - v.squaredNorm()) * x;
                 },
                 [](const Vector& x, const Vector& v) -> Vector {
                   return -2.0 * std::exp(-x.squaredNorm() - v.squaredNorm()) * v;
                 }});
  out.push_back({"sin(v1)", [](const Vector&, const Vector& v) { return std::sin(v[0]); }, zero,
                 [](const Vector& x, const Vector& v) -> Vector { return std::cos(v[0]) * unit(x.size(), 0); }});
  out.push_back({"cos(x1+v1)", [](const Vector& x, const Vector& v) { return std::cos(x[0] + v[0]); },
                 [](const Vector& x, const Vector& v) -> Vector {
                   return -std::sin(x[0] + v[0]) * unit(x.size(), 0);
                 },
                 [](const Vector& x, const Vector& v) -> Vector {
                   return -std::sin(x[0] + v[0]) * unit(x.size(), 0);
                 }});
  return out;
}

Estimate generator_probe(const TestFunction& f, const State& point, const ModelSpec& model, std::size_t n_mc,
                         Stream& stream) {
  require(n_mc >= 1, "generator_probe: n_mc must be >= 1");
  require(point.dim() == model.d, "generator_probe: dimension differs from model d");
  const Vector& x = point.x;
  const Vector& v = point.v;
  const double drift = liouville(f, x, v, model);
  const double j = model.rate(x, v);
  const double fv = f(x, v);
  Accumulator acc;
  for (std::size_t k = 0; k < n_mc; ++k) acc.add(f(x, model.density.sample(stream)) - fv);
  return {drift + j * acc.mean(), j * acc.stderr_()};
}

ProbeResidual coupling_operator_probe(const TestFunction& g, const TestFunction& h, const CoupledState& pair,
                                      const ModelSpec& model, const CouplingKnobs& knobs, std::size_t n_mc,
                                      Stream& stream) {
  require(n_mc >= 2, "coupling_operator_probe: n_mc must be >= 2");
  require(pair.dim() == model.d, "coupling_operator_probe: dimension differs from model d");
  knobs.validate();
  const Vector& x = pair.first.x;
  const Vector& v = pair.first.v;
  const Vector& xp = pair.second.x;
  const Vector& vp = pair.second.v;

  const double drift = liouville(g, x, v, model) + liouville(h, xp, vp, model);
  const double a = model.rate(x, v);
  const double b = model.rate(xp, vp);
  const double common = std::min(a, b);
  const double first_only = std::max(a - b, 0.0);
  const double second_only = std::max(b - a, 0.0);

  const Vector zk = truncate(pair.z(), knobs.kappa);
  const Vector xi = knobs.alpha * zk;
  const double gv = g(x, v);
  const double hv = h(xp, vp);

  Accumulator coupled, diff;
  for (std::size_t k = 0; k < n_mc; ++k) {
    const Vector u = model.density.sample(stream);
    const double ratio = model.density.overlap_ratio(u, xi);
    const double gu = g(x, u);
    const double hu = h(xp, u);
    double h_common = ratio * h(xp, u + xi);
    if (ratio < 1.0) h_common += (1.0 - ratio) * h(xp, reflect(zk, u));
    const double jump = common * (gu + h_common - gv - hv) + first_only * (gu - gv) + second_only * (hu - hv);
    const double single = a * (gu - gv) + b * (hu - hv);
    coupled.add(jump);
    diff.add(jump - single);
  }
  ProbeResidual r;
  r.coupled = drift + coupled.mean();
  r.residual = diff.mean();
  r.marginal = r.coupled - r.residual;
  r.se = diff.stderr_();
  return r;
}

}  // namespace dhpdmp
