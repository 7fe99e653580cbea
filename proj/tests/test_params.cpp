#include <doctest.h>

#include <cmath>

#include "dhpdmp/distance.hpp"
#include "dhpdmp/lyapunov.hpp"
#include "dhpdmp/params.hpp"
#include "dhpdmp/random.hpp"

using namespace dhpdmp;

namespace {

ModelSpec reference_model(int d = 2) {
  ModelSpec m;
  m.d = d;
  m.gamma = 4.0;
  m.potential = PotentialModel::quadratic(1.0);
  m.rate = JumpRateModel::constant(2.0);
  m.density = DensityModel::gaussian(d);
  return m;
}

// Largest beta on a dense grid of (0, min(2 theta, gamma^2/4)] with beta >= 4 (2 theta - beta).
double beta_grid_scan(double gamma, double theta) {
  const double hi = std::min(2.0 * theta, gamma * gamma / 4.0);
  double best = 0.0;
  const int n = 200000;
  for (int i = 1; i <= n; ++i) {
    const double b = hi * i / n;
    if (b >= 4.0 * (2.0 * theta - b) - 1e-12) best = b;
  }
  return best;
}

PipelineOptions quick_options() {
  PipelineOptions o;
  o.n_overlap = 20000;
  o.b2.n_mc = 20000;
  o.drift.points_per_axis = 11;
  return o;
}

}  // namespace

TEST_CASE("solve_beta on the reference model") {
  const BetaSolution b = solve_beta(4.0, PotentialModel::quadratic(1.0));
  CHECK(b.feasible);
  CHECK(b.beta == 2.0);
  CHECK(b.window_lo == doctest::Approx(1.6));
  CHECK(b.window_hi == 2.0);
  CHECK(b.k_beta_u == 0.0);
  CHECK(b.beta == doctest::Approx(beta_grid_scan(4.0, 1.0)).epsilon(1e-5));
}

TEST_CASE("solve_beta at and below the feasibility boundary") {
  const BetaSolution edge = solve_beta(2.0 * std::sqrt(2.0), PotentialModel::quadratic(1.0));
  CHECK(edge.feasible);
  CHECK(edge.window_lo == doctest::Approx(1.6));
  CHECK(edge.window_hi == doctest::Approx(2.0));
  CHECK(edge.beta == doctest::Approx(beta_grid_scan(2.0 * std::sqrt(2.0), 1.0)).epsilon(1e-5));

  const BetaSolution low = solve_beta(2.0, PotentialModel::quadratic(1.0));
  CHECK_FALSE(low.feasible);
  CHECK(low.reason == "gamma below 2·sqrt(2θ)");

  for (double theta : {0.3, 1.0, 2.5}) {
    for (double gamma : {1.0, 2.0, 3.0, 5.0, 8.0}) {
      const BetaSolution s = solve_beta(gamma, PotentialModel::quadratic(theta));
      CHECK(s.feasible == (gamma >= 2.0 * std::sqrt(2.0 * theta)));
      if (s.feasible) {
        CHECK(s.beta == doctest::Approx(beta_grid_scan(gamma, theta)).epsilon(1e-4));
        CHECK(s.beta >= 4.0 * s.k_beta_u);
        CHECK(s.beta <= gamma * gamma / 4.0);
      }
    }
  }
}

TEST_CASE("compute_alpha is the smaller root") {
  const double a = compute_alpha(2.0, 4.0);
  CHECK(a == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-14));
  CHECK(4.0 / a - 1.0 == doctest::Approx(5.8284).epsilon(1e-4));
  CHECK(a * 4.0 - a * a == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(compute_alpha(4.0, 4.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(compute_alpha(4.5, 4.0), InvalidArgument);
}

TEST_CASE("Lyapunov function structure") {
  const ModelSpec m = reference_model();
  const LyapunovFunction w = LyapunovFunction::for_model(m);
  CHECK(w.theta0() == doctest::Approx(9.0));
  CHECK(w.theta_star() == doctest::Approx(36.0 / 12.0));
  CHECK(w.theta_star() * w.theta_star() <= w.theta0());
  Stream s(1);
  for (int k = 0; k < 200; ++k) {
    Vector x(2), v(2);
    x << 3.0 * s.normal(), 3.0 * s.normal();
    v << 3.0 * s.normal(), 3.0 * s.normal();
    CHECK(w(x, v) >= w.inf_over_v(x) - 1e-9);
    CHECK(w(x, v) >= 1.0);
  }
  Vector x(2);
  x << 1.0, -2.0;
  const Vector vmin = -0.5 * w.theta_star() * x;
  CHECK(w(x, vmin) == doctest::Approx(w.inf_over_v(x)).epsilon(1e-12));
  CHECK_THROWS(LyapunovFunction::for_model(m, 2.5));
}

TEST_CASE("jump part of the generator at the origin") {
  const ModelSpec m = reference_model();
  const LyapunovFunction w = LyapunovFunction::for_model(m);
  const Vector o = Vector::Zero(2);
  CHECK(jump_part_closed_form(m, w, o, o) == doctest::Approx(4.0));
  Stream s(17);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double y = 2.0 * (w.w0(o, m.density.sample(s)) - w.w0(o, o));
    sum += y;
    sq += y * y;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  CHECK(std::abs(mean - 4.0) <= 3.0 * se);
}

TEST_CASE("drift threshold vanishes for equal rate bounds") {
  CHECK(drift_threshold_c0_star(2.0, 2.0, 4.0) == 0.0);
  CHECK(drift_threshold_c0_star(1.0, 3.0, 4.0) > 0.0);
}

TEST_CASE("closed-form drift certificate for the reference model") {
  DriftOptions o;
  o.points_per_axis = 15;
  const DriftReport r = lyapunov_drift_quadratic(reference_model(), o);
  CHECK(r.valid);
  CHECK(r.tail_certified);
  CHECK(r.min_margin >= 0.0);
  CHECK(r.c0 > 0.0);
  CHECK(r.C0 > 0.0);
  // the certificate itself, at random points well outside the grid
  const ModelSpec m = reference_model();
  const LyapunovFunction w = LyapunovFunction::for_model(m);
  Stream s(4);
  for (int k = 0; k < 1000; ++k) {
    Vector x(2), v(2);
    const double scale = std::pow(10.0, 4.0 * s.uniform());
    x << scale * s.normal(), scale * s.normal();
    v << scale * s.normal(), scale * s.normal();
    const double lw = generator_w0_closed_form(m, w, x, v);
    CHECK(lw <= -r.c0 * w.w0(x, v) + r.C0 + 1e-9 * w.w0(x, v));
  }
  CHECK_THROWS_AS(lyapunov_drift_mc(m, 2.5, o), InvalidArgument);
}

TEST_CASE("B2 first ratio at the origin equals 1 + m2") {
  const ModelSpec m = reference_model();
  const LyapunovFunction w = LyapunovFunction::for_model(m);
  B2Options o;
  o.n_mc = 100000;
  const B2Report r = verify_B2(m, w, {0.01, 0.1, 1.0}, o);
  REQUIRE_FALSE(r.first.empty());
  CHECK(r.first[0].x.norm() == 0.0);
  CHECK(std::abs(r.first[0].ratio.mean - 3.0) <= 3.0 * r.first[0].ratio.se);
  CHECK(r.pass);
  CHECK_THROWS_AS(verify_B2(m, w, {}, o), InvalidArgument);
}

TEST_CASE("B2 moment row in one dimension against quadrature") {
  const ModelSpec m = reference_model(1);
  const LyapunovFunction w = LyapunovFunction::for_model(m);
  B2Options o;
  o.n_mc = 200000;
  const std::vector<double> xi{0.05, 0.5, 2.0};
  const B2Report r = verify_B2(m, w, xi, o);
  for (std::size_t j = 0; j < xi.size(); ++j) {
    // int u^2 (phi(u) - min(phi(u), phi(u + xi))) du by the midpoint rule
    const double h = 1e-4;
    double acc = 0.0;
    for (double u = -12.0; u < 12.0; u += h) {
      const double c = u + 0.5 * h;
      const double p = std::exp(-0.5 * c * c) / std::sqrt(2.0 * M_PI);
      const double q = std::exp(-0.5 * (c + xi[j]) * (c + xi[j])) / std::sqrt(2.0 * M_PI);
      acc += c * c * (p - std::min(p, q)) * h;
    }
    const double oracle = acc / xi[j];
    CHECK(std::abs(r.moment[j].ratio.mean - oracle) <= 3.0 * r.moment[j].ratio.se + 1e-6);
    CHECK(oracle <= r.c0_double_star);
  }
}

TEST_CASE("pipeline constants on the reference model") {
  const PipelineResult r = run_pipeline(reference_model(), quick_options());
  REQUIRE(r.ok);
  const CouplingParams& p = r.params;
  for (double v : {p.beta, p.alpha, p.alpha0, p.kappa, p.a0, p.R0, p.r_star, p.K0, p.c0, p.C0, p.c_star,
                   p.c_upper_star, p.c_double_star, p.theta0, p.theta_star, p.m_beta})
    CHECK(v > 0.0);
  CHECK(p.K_beta_U == 0.0);
  CHECK(std::isfinite(p.log_epsilon));
  CHECK(std::isfinite(p.log_lambda_star));
  CHECK(p.beta == doctest::Approx(p.alpha * 4.0 - p.alpha * p.alpha).epsilon(1e-12));
  CHECK(p.alpha0 == doctest::Approx(4.0 / p.alpha - 1.0));
  CHECK(p.R0 == doctest::Approx(2.0 * p.r_star * (1.0 + p.alpha0 + 1.0 / p.alpha)));
  CHECK(p.kappa == doctest::Approx(p.R0 / p.alpha0));
  CHECK(p.log_lambda_star <= p.log_first_rate_term() + 1e-12);

  // constant rate: a0 = 4 K0 / (alpha0 alpha) and K0 = lambda2 max(c^*, c** alpha)
  CHECK(p.K0 == doctest::Approx(2.0 * std::max(p.c_upper_star, p.c_double_star * p.alpha)));
  CHECK(p.a0 == doctest::Approx(4.0 * p.K0 / (p.alpha0 * p.alpha)));

  // linear-scale recomputation in long double where nothing underflows
  const long double x = static_cast<long double>(p.a0) * p.R0;
  const long double mr = std::min<long double>(p.alpha, 2.0L * p.c_star);
  const long double eps = x * mr / (8.0L * p.C0 * std::expm1(x));
  CHECK(static_cast<double>(std::log(eps)) == doctest::Approx(p.log_epsilon).epsilon(1e-10));
  const long double t1 = p.c0 * eps / (2.0L * (1.0L + 2.0L * eps));
  const long double t2 = x * mr / (4.0L * std::expm1(x) * (1.0L + 4.0L * eps * p.C0 / p.c0));
  CHECK(static_cast<double>(std::log(std::min(t1, t2))) == doctest::Approx(p.log_lambda_star).epsilon(1e-10));
}

TEST_CASE("lambda* does not grow when the overlap bound shrinks") {
  const ModelSpec m = reference_model();
  DriftOptions o;
  o.points_per_axis = 11;
  const DriftReport d = lyapunov_drift_quadratic(m, o);
  double prev = std::numeric_limits<double>::infinity();
  for (double c : {0.5, 0.1, 1e-3, 1e-8}) {
    const CouplingParams p = build_params(m, d, c, 0.24, 3.0);
    CHECK(p.log_lambda_star <= prev);
    CHECK(p.log_lambda_star <= p.log_first_rate_term());
    prev = p.log_lambda_star;
  }
  CHECK_THROWS_AS(build_params(m, d, 0.0, 0.24, 3.0), InvalidArgument);
}

TEST_CASE("state-dependent rate keeps every constant positive") {
  ModelSpec m = reference_model();
  m.rate = JumpRateModel::sinusoidal(1.5, 2.5);
  const PipelineResult r = run_pipeline(m, quick_options());
  REQUIRE(r.ok);
  CHECK(r.params.a0 > 4.0 * r.params.K0 / (r.params.alpha0 * r.params.alpha));
  CHECK(std::isfinite(r.params.log_lambda_star));
  CHECK(r.params.log_lambda_star <= r.params.log_first_rate_term() + 1e-12);
}

TEST_CASE("infeasible gamma is reported, not thrown") {
  ModelSpec m = reference_model();
  m.gamma = 2.0;
  const PipelineResult r = run_pipeline(m, quick_options());
  CHECK_FALSE(r.feasible);
  CHECK_FALSE(r.ok);
  CHECK(r.failure == "gamma below 2·sqrt(2θ)");
}

TEST_CASE("the good region sits inside r <= R0") {
  const PipelineResult r = run_pipeline(reference_model(), quick_options());
  REQUIRE(r.ok);
  Stream s(8);
  const RegionCheck c = check_region_containment(reference_model(), r.params, 20000, s);
  CHECK(c.contained);
  CHECK(c.max_r <= r.params.R0);
  CHECK(c.max_r > 0.0);
}

TEST_CASE("distance function estimates") {
  const double a0 = 4.157;
  CHECK(distance_f(0.0, a0) == 0.0);
  CHECK(distance_f(1e3, a0) == doctest::Approx(1.0 / a0));
  Stream s(12);
  for (int k = 0; k < 10000; ++k) {
    const double t = 5.0 * s.uniform(), u = 5.0 * s.uniform();
    const double diff = distance_f(u, a0) - distance_f(t, a0);
    CHECK(diff <= distance_f_prime(t, a0) * (u - t) + 1e-15);
    CHECK(diff <= distance_f_prime(t, a0) / a0 + 1e-15);
  }
}

TEST_CASE("functionals vanish on identical pairs") {
  const PipelineResult r = run_pipeline(reference_model(), quick_options());
  REQUIRE(r.ok);
  const LyapunovFunction w = LyapunovFunction::for_model(reference_model());
  Vector x(2), v(2);
  x << 0.3, -0.2;
  v << 1.0, 0.5;
  const CoupledState same(State(x, v), State(x, v));
  CHECK(distance_r(same, r.params) == 0.0);
  CHECK(functional_FG(same, r.params, w) == 0.0);
  CHECK(semi_metric_Phi(same, w) == 0.0);
  Vector x2 = x;
  x2[0] += 5.0;
  const CoupledState far(State(x, v), State(x2, v));
  CHECK(semi_metric_Phi(far, w) == doctest::Approx(w(x, v) + w(x2, v)));
  CHECK(functional_FG(far, r.params, w) > 0.0);
}
