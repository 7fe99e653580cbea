#include <doctest.h>

#include <cmath>

#include "dhpdmp/coupling.hpp"
#include "dhpdmp/parallel.hpp"
#include "dhpdmp/pdmp.hpp"
#include "dhpdmp/probes.hpp"
#include "dhpdmp/stats.hpp"
#include "dhpdmp/verify.hpp"

using namespace dhpdmp;

namespace {

ModelSpec reference_model() {
  ModelSpec m;
  m.d = 2;
  m.gamma = 4.0;
  m.potential = PotentialModel::quadratic(1.0);
  m.rate = JumpRateModel::constant(2.0);
  m.density = DensityModel::gaussian(2);
  return m;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("Kolmogorov tail values") {
  CHECK(kolmogorov_q(1.36) == doctest::Approx(0.0495).epsilon(0.02));
  CHECK(kolmogorov_q(1.63) == doctest::Approx(0.0098).epsilon(0.03));
  CHECK(kolmogorov_q(0.0) == 1.0);
}

TEST_CASE("KS tests accept the right law and reject a wrong one") {
  Stream s(2);
  std::vector<double> e(5000), f(5000);
  for (auto& x : e) x = s.exponential(2.0);
  for (auto& x : f) x = s.exponential(2.0);
  auto cdf2 = [](double t) { return t <= 0 ? 0.0 : -std::expm1(-2.0 * t); };
  auto cdf3 = [](double t) { return t <= 0 ? 0.0 : -std::expm1(-3.0 * t); };
  CHECK(ks_test(e, cdf2).passes(0.01));
  CHECK_FALSE(ks_test(e, cdf3).passes(0.01));
  CHECK(ks_test_two_sample(e, f).passes(0.01));
  for (auto& x : f) x *= 1.3;
  CHECK_FALSE(ks_test_two_sample(e, f).passes(0.01));
}

TEST_CASE("least squares slope") {
  const std::vector<double> t{0, 1, 2, 3}, y{1, 3, 5, 7};
  CHECK(least_squares_slope(t, y) == doctest::Approx(2.0));
}

TEST_CASE("thinning with constant rate") {
  const ThinningCheck c = check_thinning(reference_model(), 10000, 3);
  CHECK(c.passed);
}

TEST_CASE("state-dependent thinning accepts at the expected fraction") {
  ModelSpec m = reference_model();
  m.rate = JumpRateModel::sinusoidal(1.0, 3.0);
  Stream s(5);
  const EventLog log = simulate(State::zero(2), 2000.0, m, s);
  const double frac = static_cast<double>(log.events.size()) / static_cast<double>(log.candidates);
  const double sigma = std::sqrt(0.25 / static_cast<double>(log.candidates));
  CHECK(frac >= 1.0 / 3.0 - 3.0 * sigma);
  CHECK(frac <= 1.0 + 3.0 * sigma);
  for (const auto& ev : log.events) CHECK(ev.pre.x == ev.post.x);
}

TEST_CASE("long-run averages settle") {
  const ModelSpec m = reference_model();
  const FlowIntegrator flow = FlowIntegrator::for_model(m);
  const Stream root(6);
  const double T = 50.0;
  const std::size_t n = 400;
  std::vector<double> a(n), b(n);
  parallel_for(n, [&](std::size_t i) {
    Stream s = root.split(i);
    const EventLog log = simulate(State(vec2(1.0, 0.0), vec2(0.0, 0.0)), 4.0 * T, m, flow, s);
    a[i] = state_at(log, flow, 1.5 * T).x.squaredNorm();
    b[i] = state_at(log, flow, 3.0 * T).x.squaredNorm();
  });
  Accumulator ea, eb;
  for (double x : a) ea.add(x);
  for (double x : b) eb.add(x);
  const double se = std::hypot(ea.stderr_(), eb.stderr_());
  CHECK(std::abs(ea.mean() - eb.mean()) <= 3.0 * se);
}

TEST_CASE("common jump splits into basic and reflection by the overlap mass") {
  const DensityModel phi = DensityModel::gaussian(2);
  const CouplingKnobs k{0.6, 2.0};
  const CoupledState start(State(vec2(1.5, 0.0), vec2(0.1, 0.2)), State(vec2(0.0, 0.0), vec2(-1.0, 0.4)));
  Stream s(7);
  const int n = 50000;
  int basic = 0;
  std::vector<double> second_speed;
  for (int i = 0; i < n; ++i) {
    CoupledState p = start;
    const Branch b = common_jump(p, phi, k, s);
    const Vector xi = k.alpha * truncate(start.z(), k.kappa);
    if (b == Branch::basic) {
      ++basic;
      CHECK((p.second.v - p.first.v - xi).norm() < 1e-12);
    } else {
      CHECK(p.second.v.norm() == doctest::Approx(p.first.v.norm()));
    }
    CHECK(p.first.x == start.first.x);
    second_speed.push_back(p.second.v.norm());
  }
  const double A = overlap_A_quadrature(phi, 0.6 * 1.5);
  const double sigma = std::sqrt(A * (1 - A) / n);
  CHECK(std::abs(static_cast<double>(basic) / n - A) <= 3.0 * sigma);
  CHECK(ks_test(second_speed, [&](double r) { return phi.radial_cdf(r); }).passes(0.01));
}

TEST_CASE("a common jump at equal positions coalesces the pair") {
  const DensityModel phi = DensityModel::gaussian(2);
  Stream s(13);
  for (int k = 0; k < 100; ++k) {
    CoupledState p(State(vec2(0.5, 0.5), vec2(1.0, 0.0)), State(vec2(0.5, 0.5), vec2(-1.0, 2.0)));
    CHECK(common_jump(p, phi, CouplingKnobs{0.5, 1.0}, s) == Branch::basic);
    CHECK(p.coalesced());
  }
}

TEST_CASE("coupled chain from a coalesced pair stays coalesced") {
  ModelSpec m = reference_model();
  m.rate = JumpRateModel::sinusoidal(1.0, 3.0);
  Stream s(1);
  const State a(vec2(1.0, -1.0), vec2(0.3, 0.3));
  const CoupledEventLog log = coupled_simulate(CoupledState(a, a), 10.0, m, CouplingKnobs{0.5, 1.0}, s);
  CHECK(log.final_state.coalesced());
  CHECK(coalescence_time(log) == 0.0);
}

TEST_CASE("generator probe on coordinate functions") {
  const GeneratorCheck g = check_generator(reference_model(), 3, 100000, 9);
  CHECK(g.passed);
}

TEST_CASE("coupling probes: Gaussian g with zero h, and v1 through the reflection branch") {
  const ModelSpec m = reference_model();
  const CouplingKnobs k{0.58, 1.5};
  const auto battery = standard_battery();
  const TestFunction zero = zero_function();
  const CoupledState p(State(vec2(0.4, -0.2), vec2(0.5, 1.0)), State(vec2(-0.3, 0.3), vec2(-0.2, 0.1)));
  REQUIRE(p.z().norm() <= k.kappa);
  Stream s1(31), s2(32);
  const ProbeResidual r1 = coupling_operator_probe(battery[2], zero, p, m, k, 1000000, s1);
  CHECK(r1.passes(3.0));
  const ProbeResidual r2 = coupling_operator_probe(zero, battery[0], p, m, k, 1000000, s2);
  CHECK(r2.passes(3.0));
}

TEST_CASE("coupling residual suite under a state-dependent rate") {
  ModelSpec m = reference_model();
  m.rate = JumpRateModel::sinusoidal(1.0, 3.0);
  const CouplingCheck c = check_coupling(m, CouplingKnobs{0.58, 22.7}, 3, 200000, 4);
  CHECK(c.passed);
}

TEST_CASE("parallel ensembles do not depend on the thread count") {
  const ModelSpec m = reference_model();
  const Stream root(44);
  auto run = [&](std::size_t threads) {
    std::vector<double> out(64);
    parallel_for(
        64,
        [&](std::size_t i) {
          Stream s = root.split(i);
          out[i] = simulate(State(vec2(1.0, 0.0), vec2(0.0, 0.0)), 5.0, m, s).final_state.x.norm();
        },
        threads);
    return out;
  };
  CHECK(run(1) == run(4));
}

TEST_CASE("simulator preconditions") {
  const ModelSpec m = reference_model();
  Stream s(1);
  CHECK_THROWS_AS(simulate(State::zero(2), -1.0, m, s), InvalidArgument);
  CHECK_THROWS_AS(simulate(State::zero(3), 1.0, m, s), InvalidArgument);
  CHECK_THROWS_AS(coupled_simulate(CoupledState(State::zero(2), State::zero(2)), 1.0, m, CouplingKnobs{0.0, 1.0}, s),
                  InvalidArgument);
}
