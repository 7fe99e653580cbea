#include "dhpdmp/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dhpdmp {

BetaSolution solve_beta(double gamma, const PotentialModel& potential) {
  if (!potential.is_quadratic())
    throw Unsupported("solve_beta: custom potentials need a K_{beta,U} evaluator and a scan over beta");
  const double theta = potential.theta();
  require(theta > 0.0, "solve_beta: theta must be > 0");
  require(gamma > 0.0 && std::isfinite(gamma), "solve_beta: gamma must be > 0");

  BetaSolution sol;
  sol.window_lo = 8.0 * theta / 5.0;
  sol.window_hi = std::min(2.0 * theta, gamma * gamma / 4.0);
  // gamma >= 2 sqrt(2 theta), with round-off slack so that gamma = 2 sqrt(2) passes for theta = 1
  if (gamma * gamma < 8.0 * theta * (1.0 - 1e-12)) {
    sol.reason = "gamma below 2·sqrt(2θ)";
    return sol;
  }
  if (sol.window_hi < sol.window_lo) {
    sol.reason = "empty feasibility window";
    return sol;
  }
  sol.beta = sol.window_hi;
  sol.k_beta_u = potential.k_beta(sol.beta);
  if (sol.beta < 4.0 * sol.k_beta_u - 1e-12 * sol.beta) {
    sol.reason = "beta < 4 K_{beta,U}";
    return sol;
  }
  sol.feasible = true;
  return sol;
}

double compute_alpha(double beta, double gamma) {
  require(gamma > 0.0 && std::isfinite(gamma), "compute_alpha: gamma must be > 0");
  require(beta > 0.0, "compute_alpha: beta must be > 0");
  const double disc_top = gamma * gamma / 4.0;
  require(beta <= disc_top * (1.0 + 1e-12), "compute_alpha: beta exceeds gamma^2/4");
  const double disc = std::max(gamma * gamma - 4.0 * beta, 0.0);
  // 2 beta / (gamma + sqrt(.)) equals (gamma - sqrt(.)) / 2 without cancellation
  const double alpha = 2.0 * beta / (gamma + std::sqrt(disc));
  const double back = alpha * gamma - alpha * alpha;
  if (std::abs(back - beta) > 1e-12 * beta) throw InvalidArgument("compute_alpha: root check failed");
  return alpha;
}

Geometry compute_geometry(const ModelSpec& model, const DriftReport& drift) {
  require(drift.valid, "geometry: drift certificate is not valid");
  require(drift.c0 > 0.0 && drift.C0 > 0.0, "geometry: drift constants must be > 0");
  const BetaSolution sol = solve_beta(model.gamma, model.potential);
  if (!sol.feasible) throw Infeasible(sol.reason);
  Geometry g;
  g.beta = sol.beta;
  g.k_beta_u = sol.k_beta_u;
  g.alpha = compute_alpha(g.beta, model.gamma);
  g.alpha0 = model.gamma / g.alpha - 1.0;
  g.r_star = drift.r_star;
  g.R0 = 2.0 * g.r_star * (1.0 + g.alpha0 + 1.0 / g.alpha);
  g.kappa = g.R0 / g.alpha0;
  return g;
}

namespace {

/// log(x / (e^x - 1)) for x > 0.
double log_x_over_expm1(double x) {
  if (x < 1.0) return std::log(x / std::expm1(x));
  return std::log(x) - x - std::log1p(-std::exp(-x));
}

}  // namespace

double CouplingParams::log_first_rate_term() const {
  return std::log(c0) + log_epsilon - std::log(2.0) - std::log1p(2.0 * epsilon);
}

CouplingParams build_params(const ModelSpec& model, const DriftReport& drift, double c_star,
                            double c_upper_star, double c_double_star) {
  model.validate();
  require(drift.valid, "build_params: drift certificate is not valid");
  require(drift.c0 > 0.0 && drift.C0 > 0.0, "build_params: drift constants must be > 0");
  require(c_star > 0.0 && c_star <= 1.0, "build_params: c_star must lie in (0, 1]");
  require(c_upper_star >= 0.0 && std::isfinite(c_upper_star), "build_params: c_upper_star must be >= 0");
  require(c_double_star > 0.0 && std::isfinite(c_double_star), "build_params: c_double_star must be > 0");

  const Geometry g = compute_geometry(model, drift);
  const double l1 = model.rate.lambda1();
  const double l2 = model.rate.lambda2();
  const double lj = model.rate.lambda_j();
  const double cdd1 = std::max(1.0, c_double_star);

  CouplingParams p;
  p.beta = g.beta;
  p.K_beta_U = g.k_beta_u;
  p.alpha = g.alpha;
  p.alpha0 = g.alpha0;
  p.r_star = g.r_star;
  p.R0 = g.R0;
  p.kappa = g.kappa;
  p.c0 = drift.c0;
  p.C0 = drift.C0;
  p.c_star = c_star;
  p.c_upper_star = c_upper_star;
  p.c_double_star = c_double_star;
  p.beta_exp = drift.beta_exp;
  p.m_beta = model.density.moment(drift.beta_exp);
  const LyapunovFunction w = LyapunovFunction::for_model(model, drift.beta_exp);
  p.theta0 = w.theta0();
  p.theta_star = w.theta_star();

  p.K0 = l2 * std::max(c_upper_star, c_double_star * p.alpha) + 2.0 * lj * (1.0 + p.alpha) * cdd1;
  p.a0 = 4.0 * p.K0 / (p.alpha0 * p.alpha) +
         4.0 * std::max(1.0 / (l1 * c_star), 2.0 / p.c0) * p.alpha * lj * cdd1;
  require(p.a0 > 0.0 && std::isfinite(p.a0), "build_params: a0 is not positive");

  const double x = p.a0 * p.R0;
  const double min_rate = std::min(p.alpha, l1 * c_star);
  const double log_t2 = log_x_over_expm1(x) + std::log(min_rate) - std::log(8.0 * p.C0);
  double log_t1 = std::numeric_limits<double>::infinity();
  if (lj > 0.0) {
    // l1 c* a0 / (4 alpha lJ cdd1) - 1 expanded by hand: when 1/(l1 c*) wins the max the
    // two unit terms cancel exactly, and the remainder is far below double resolution for small c*.
    const double inner = l1 * c_star * p.K0 / (p.alpha0 * p.alpha * p.alpha * lj * cdd1) +
                         std::max(0.0, 2.0 * l1 * c_star / p.c0 - 1.0);
    require(inner > 0.0, "build_params: epsilon term is not positive");
    log_t1 = std::log(p.c0 / (4.0 * p.C0)) + std::log(inner);
  }
  p.log_epsilon = std::min(log_t1, log_t2);
  p.epsilon = std::exp(p.log_epsilon);

  const double log_r1 = p.log_first_rate_term();
  const double log_r2 = log_x_over_expm1(x) + std::log(min_rate) - std::log(4.0) -
                        std::log1p(4.0 * p.epsilon * p.C0 / p.c0);
  p.log_lambda_star = std::min(log_r1, log_r2);
  p.lambda_star = std::exp(p.log_lambda_star);
  require(std::isfinite(p.log_lambda_star), "build_params: lambda* is not positive");

  p.provenance = {{"beta", "closed-form"},
                  {"alpha", "closed-form"},
                  {"c0", drift.method},
                  {"C0", drift.method},
                  {"r_star", "closed-form ellipsoid"},
                  {"R0", "upper bound 2 R* (1 + alpha0 + 1/alpha)"},
                  {"c_star", "input"},
                  {"c_upper_star", "input"},
                  {"c_double_star", "input"},
                  {"epsilon", "closed-form (log space)"},
                  {"lambda_star", "closed-form (log space)"}};
  return p;
}

PipelineResult run_pipeline(const ModelSpec& model, const PipelineOptions& opts) {
  model.validate();
  PipelineResult res;
  res.beta = solve_beta(model.gamma, model.potential);
  if (!res.beta.feasible) {
    res.failure = res.beta.reason;
    return res;
  }
  res.feasible = true;

  const bool closed = opts.prefer_closed_form && opts.beta_exp == 2.0 &&
                      std::isfinite(model.density.moment(2.0));
  res.drift = closed ? lyapunov_drift_quadratic(model, opts.drift)
                     : lyapunov_drift_mc(model, opts.beta_exp, opts.drift);
  if (!res.drift.valid) {
    res.failure = "drift certificate failed";
    return res;
  }
  res.geometry = compute_geometry(model, res.drift);

  Stream root(opts.seed);
  Stream overlap_stream = root.split(1);
  res.overlap = estimate_overlap_constants(model.density, res.geometry.alpha, res.geometry.kappa,
                                           default_radius_grid(res.geometry.kappa, opts.overlap_grid),
                                           opts.n_overlap, overlap_stream);
  if (!(res.overlap.c_star > 0.0)) {
    res.failure = "overlap constant c_star is not positive";
    return res;
  }

  const double xi_max = res.geometry.alpha * res.geometry.kappa;
  std::vector<double> xi_grid;
  const std::size_t nx = std::max<std::size_t>(opts.b2_xi_points, 2);
  for (std::size_t i = 0; i < nx; ++i)
    xi_grid.push_back(xi_max * std::pow(1e-3, 1.0 - static_cast<double>(i) / static_cast<double>(nx - 1)));
  const LyapunovFunction w = LyapunovFunction::for_model(model, res.drift.beta_exp);
  res.b2 = verify_B2(model, w, xi_grid, opts.b2);
  if (!res.b2.pass) {
    res.failure = "moment inequality estimate failed";
    return res;
  }

  res.params = build_params(model, res.drift, res.overlap.c_star, res.overlap.c_upper_star,
                            res.b2.c_double_star);
  res.params.provenance["c_star"] = "MC (3 se) / half-space quadrature";
  res.params.provenance["c_upper_star"] = "MC (3 se)";
  res.params.provenance["c_double_star"] = "MC (3 se)";
  res.ok = true;
  return res;
}

RegionCheck check_region_containment(const ModelSpec& model, const CouplingParams& params,
                                     std::size_t n, Stream& stream) {
  require(n >= 1, "check_region_containment: n must be >= 1");
  const LyapunovFunction w = LyapunovFunction::for_model(model, params.beta_exp);
  const int d = model.d;
  const double level = 4.0 * params.C0;
  auto in_region = [&](const Eigen::VectorXd& y) {
    const Vector x = y.segment(0, d), v = y.segment(d, d);
    const Vector xp = y.segment(2 * d, d), vp = y.segment(3 * d, d);
    return params.c0 * (w(x, v) + w(xp, vp)) <= level;
  };

  RegionCheck rc;
  rc.n = n;
  for (std::size_t i = 0; i < n; ++i) {
    // random direction in R^{4d}, scaled to a uniform fraction of the
    // boundary distance along it (boundary found by bisection)
    Eigen::VectorXd dir(4 * d);
    for (Eigen::Index k = 0; k < dir.size(); ++k) dir[k] = stream.normal();
    dir.normalize();
    double lo = 0.0, hi = 1.0;
    while (in_region(hi * dir)) hi *= 2.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (in_region(mid * dir) ? lo : hi) = mid;
    }
    const double frac = std::pow(stream.uniform(), 1.0 / (4.0 * d));
    const Eigen::VectorXd y = (frac * lo) * dir;
    const CoupledState pair(State(y.segment(0, d), y.segment(d, d)),
                            State(y.segment(2 * d, d), y.segment(3 * d, d)));
    rc.max_r = std::max(rc.max_r, pair.r(params.alpha, params.alpha0));
  }
  rc.contained = rc.max_r <= params.R0;
  return rc;
}

}  // namespace dhpdmp
