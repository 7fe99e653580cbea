#include <doctest.h>

#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include "dhpdmp/flow.hpp"
#include "dhpdmp/model.hpp"
#include "dhpdmp/random.hpp"

using namespace dhpdmp;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

double normal_cdf(double x) { return boost::math::cdf(boost::math::normal(), x); }

// Plain RK4 with boost odeint on the scalar oscillator, used as an outside reference.
std::array<double, 2> odeint_oscillator(double gamma, double theta, double x0, double v0, double t, double h) {
  using S = std::array<double, 2>;
  S s{x0, v0};
  boost::numeric::odeint::runge_kutta4<S> stepper;
  auto rhs = [&](const S& y, S& dy, double) {
    dy[0] = y[1];
    dy[1] = -gamma * y[1] - 2.0 * theta * y[0];
  };
  boost::numeric::odeint::integrate_const(stepper, rhs, s, 0.0, t, h);
  return s;
}

}  // namespace

TEST_CASE("truncate caps the norm and keeps direction") {
  const Vector t = truncate(vec({3.0, 4.0}), 1.0);
  CHECK(t[0] == doctest::Approx(0.6));
  CHECK(t[1] == doctest::Approx(0.8));
  CHECK(truncate(vec({0.3, 0.4}), 1.0) == vec({0.3, 0.4}));
  CHECK(truncate(vec({0.0, 0.0}), 1.0).norm() == 0.0);
  CHECK_THROWS_AS(truncate(vec({1.0}), 0.0), InvalidArgument);
}

TEST_CASE("reflect is an involutive isometry") {
  Stream s(3);
  for (int k = 0; k < 200; ++k) {
    const Vector axis = s.direction(3) * (0.1 + s.uniform());
    const Vector u = vec({s.normal(), s.normal(), s.normal()});
    const Vector r = reflect(axis, u);
    CHECK(r.norm() == doctest::Approx(u.norm()).epsilon(1e-12));
    CHECK((reflect(axis, r) - u).norm() < 1e-12);
    CHECK(r.dot(axis) == doctest::Approx(-u.dot(axis)).epsilon(1e-10));
  }
  CHECK(reflect(Vector::Zero(2), vec({1.0, 2.0})) == vec({-1.0, -2.0}));
}

TEST_CASE("overlap densities at a Gaussian point") {
  const DensityModel phi = DensityModel::gaussian(1);
  const double p0 = 1.0 / std::sqrt(2.0 * M_PI);
  const double p2 = p0 * std::exp(-2.0);
  CHECK(psi(phi, vec({2.0}), vec({0.0})) == doctest::Approx(p2).epsilon(1e-12));
  CHECK(p2 == doctest::Approx(0.05399).epsilon(1e-3));
  CHECK(capital_psi(phi, vec({2.0}), vec({0.0})) == doctest::Approx(p0 - p2).epsilon(1e-12));
  CHECK(p0 - p2 == doctest::Approx(0.34495).epsilon(1e-4));
}

TEST_CASE("Gaussian overlap mass is 2 Phi(-|xi|/2)") {
  const double want = 2.0 * normal_cdf(-1.0);
  CHECK(want == doctest::Approx(0.3173).epsilon(1e-3));
  for (int d : {1, 2, 5}) {
    const DensityModel phi = DensityModel::gaussian(d);
    Stream s(11 + d);
    const Estimate e = overlap_A(phi, 2.0, 200000, s);
    CHECK(std::abs(e.mean - want) <= 3.0 * e.se);
    CHECK(overlap_A_quadrature(phi, 2.0) == doctest::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("heavy-tail overlap against direct one-dimensional quadrature") {
  const double b = 3.0;
  const DensityModel phi = DensityModel::heavy_tail(1, b);
  // d = 1: c (1 + |u|)^{-1-b} with c = b / 2
  auto pdf = [b](double u) { return 0.5 * b * std::pow(1.0 + std::abs(u), -1.0 - b); };
  CHECK(phi.pdf(vec({0.7})) == doctest::Approx(pdf(0.7)).epsilon(1e-12));
  double prev = 1.0;
  for (double xi : {0.1, 0.25, 0.5, 1.0, 2.0, 4.0}) {
    auto integrand = [&](double u) { return std::min(pdf(u), pdf(u + xi)); };
    const double left = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, -std::numeric_limits<double>::infinity(), -xi / 2.0, 15, 1e-12);
    const double right = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, -xi / 2.0, std::numeric_limits<double>::infinity(), 15, 1e-12);
    const double oracle = left + right;
    CHECK(oracle > 0.0);
    CHECK(oracle < 1.0);
    CHECK(oracle <= prev);
    prev = oracle;
    CHECK(overlap_A_quadrature(phi, xi) == doctest::Approx(oracle).epsilon(1e-7));
    Stream s(static_cast<std::uint64_t>(xi * 100));
    const Estimate e = overlap_A(phi, xi, 100000, s);
    CHECK(std::abs(e.mean - oracle) <= 3.0 * e.se + 1e-12);
  }
}

TEST_CASE("overlap constants for the Gaussian at alpha = kappa = 1") {
  const DensityModel phi = DensityModel::gaussian(2);
  Stream s(5);
  const OverlapConstants c = estimate_overlap_constants(phi, 1.0, 1.0, {0.25, 0.5, 1.0}, 100000, s);
  CHECK(c.c_star == doctest::Approx(2.0 * normal_cdf(-0.5)).epsilon(1e-6));
  CHECK(c.c_star == doctest::Approx(0.6171).epsilon(1e-3));
  CHECK(c.c_upper_star > 0.0);
  // (1 - A(r)) / r is largest at the smallest radius, where A ~ 1 - r / sqrt(2 pi)
  CHECK(c.c_upper_star < 1.0 / std::sqrt(2.0 * M_PI) + 0.05);
}

TEST_CASE("densities sample their radial laws") {
  for (const DensityModel& phi : {DensityModel::gaussian(2), DensityModel::heavy_tail(2, 1.0),
                                  DensityModel::stretched_exp(3, 0.7)}) {
    Stream s(21);
    // radial CDF at the sample median must be near 1/2
    std::vector<double> r(20001);
    for (auto& x : r) x = phi.sample_radius(s);
    std::nth_element(r.begin(), r.begin() + 10000, r.end());
    CHECK(phi.radial_cdf(r[10000]) == doctest::Approx(0.5).epsilon(0.03));
  }
  CHECK(DensityModel::gaussian(2).moment(2.0) == doctest::Approx(2.0));
  CHECK(std::isinf(DensityModel::heavy_tail(2, 1.0).moment(2.0)));
  CHECK(std::isfinite(DensityModel::heavy_tail(2, 1.0).moment(0.5)));
}

TEST_CASE("exact damped flow, under- and over-damped") {
  const FlowIntegrator f = FlowIntegrator::exact(3.0, PotentialModel::quadratic(1.0));
  const State s = f.flow(State(vec({1.0}), vec({0.0})), 1.0);
  CHECK(s.x[0] == doctest::Approx(2.0 * std::exp(-1.0) - std::exp(-2.0)).epsilon(1e-13));
  CHECK(s.v[0] == doctest::Approx(-2.0 * std::exp(-1.0) + 2.0 * std::exp(-2.0)).epsilon(1e-13));
  CHECK(s.x[0] == doctest::Approx(0.60042).epsilon(1e-5));
  CHECK(s.v[0] == doctest::Approx(-0.46508).epsilon(1e-5));
  const auto ref = odeint_oscillator(3.0, 1.0, 1.0, 0.0, 1.0, 1e-5);
  CHECK(std::abs(s.x[0] - ref[0]) < 1e-10);
  CHECK(std::abs(s.v[0] - ref[1]) < 1e-10);

  for (auto [gamma, theta] : {std::pair{1.0, 2.0}, std::pair{2.0, 0.5}, std::pair{4.0, 2.0}, std::pair{5.0, 1.0}}) {
    const FlowIntegrator g = FlowIntegrator::exact(gamma, PotentialModel::quadratic(theta));
    const State e = g.flow(State(vec({0.3, -1.2}), vec({0.8, 0.1})), 0.7);
    for (int i = 0; i < 2; ++i) {
      const double x0 = i == 0 ? 0.3 : -1.2, v0 = i == 0 ? 0.8 : 0.1;
      const auto o = odeint_oscillator(gamma, theta, x0, v0, 0.7, 1e-5);
      CHECK(std::abs(e.x[i] - o[0]) < 1e-10);
      CHECK(std::abs(e.v[i] - o[1]) < 1e-10);
    }
  }
}

TEST_CASE("free damped flow for theta = 0") {
  const FlowIntegrator f = FlowIntegrator::exact(2.0, PotentialModel::quadratic(0.0));
  const State s = f.flow(State(vec({1.0}), vec({3.0})), 0.5);
  CHECK(s.x[0] == doctest::Approx(1.0 + 3.0 * (1.0 - std::exp(-1.0)) / 2.0).epsilon(1e-13));
  CHECK(s.v[0] == doctest::Approx(3.0 * std::exp(-1.0)).epsilon(1e-13));
}

TEST_CASE("coupled flow differences follow the same oscillator") {
  const FlowIntegrator f = FlowIntegrator::exact(3.0, PotentialModel::quadratic(1.0));
  const CoupledState p(State(vec({1.0, 0.5}), vec({0.2, -0.4})), State(vec({-0.3, 0.1}), vec({1.0, 0.0})));
  const CoupledState q = coupled_flow(f, p, 0.7);
  const State dz = f.flow(State(p.z(), p.w()), 0.7);
  CHECK((q.z() - dz.x).norm() < 1e-13);
  CHECK((q.w() - dz.v).norm() < 1e-13);
}

TEST_CASE("streams are reproducible and split independently of order") {
  Stream a(9), b(9);
  for (int i = 0; i < 10; ++i) CHECK(a.uniform() == b.uniform());
  const Stream root(9);
  Stream c1 = root.split(4);
  Stream c2 = root.split(4);
  Stream other = root.split(5);
  const double x = c1.normal();
  CHECK(x == c2.normal());
  CHECK(x != other.normal());
}
