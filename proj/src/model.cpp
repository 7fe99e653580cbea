#include "dhpdmp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

namespace dhpdmp {

// ---------------------------------------------------------------------------
// Potential

PotentialModel PotentialModel::quadratic(double theta) {
  require(theta >= 0.0 && std::isfinite(theta), "quadratic potential: theta must be >= 0");
  PotentialModel p;
  p.kind_ = Kind::quadratic;
  p.theta_ = theta;
  p.lipschitz_ = 2.0 * theta;
  return p;
}

PotentialModel PotentialModel::custom(ValueFn value, GradFn grad, double grad_lipschitz,
                                      std::function<double(double)> k_beta) {
  require(static_cast<bool>(value) && static_cast<bool>(grad), "custom potential: missing callbacks");
  require(grad_lipschitz >= 0.0 && std::isfinite(grad_lipschitz),
          "custom potential: gradient Lipschitz constant must be finite");
  PotentialModel p;
  p.kind_ = Kind::custom;
  p.lipschitz_ = grad_lipschitz;
  p.value_ = std::move(value);
  p.grad_ = std::move(grad);
  p.k_beta_ = std::move(k_beta);
  return p;
}

double PotentialModel::value(const Vector& x) const {
  if (kind_ == Kind::quadratic) return theta_ * x.squaredNorm();
  return value_(x);
}

Vector PotentialModel::gradient(const Vector& x) const {
  if (kind_ == Kind::quadratic) return 2.0 * theta_ * x;
  return grad_(x);
}

double PotentialModel::k_beta(double beta) const {
  if (kind_ == Kind::quadratic) return std::abs(2.0 * theta_ - beta);
  if (!k_beta_) throw Unsupported("K_{beta,U} needs a user-supplied evaluator for custom potentials");
  return k_beta_(beta);
}

// ---------------------------------------------------------------------------
// Jump rate

JumpRateModel JumpRateModel::constant(double lambda) {
  require(lambda > 0.0 && std::isfinite(lambda), "constant rate must be > 0");
  JumpRateModel j;
  j.fn_ = [lambda](const Vector&, const Vector&) { return lambda; };
  j.lambda1_ = j.lambda2_ = lambda;
  j.lambda_j_ = 0.0;
  j.constant_ = true;
  j.description_ = "constant";
  return j;
}

JumpRateModel JumpRateModel::sinusoidal(double lambda1, double lambda2) {
  require(lambda1 > 0.0 && lambda1 <= lambda2 && std::isfinite(lambda2),
          "sinusoidal rate: need 0 < lambda1 <= lambda2");
  if (lambda1 == lambda2) return constant(lambda1);
  const double mid = 0.5 * (lambda1 + lambda2);
  const double amp = 0.5 * (lambda2 - lambda1);
  JumpRateModel j;
  j.fn_ = [mid, amp, lambda1, lambda2](const Vector& x, const Vector& v) {
    return std::clamp(mid + amp * std::sin(x.norm() + v.norm()), lambda1, lambda2);
  };
  j.lambda1_ = lambda1;
  j.lambda2_ = lambda2;
  j.lambda_j_ = amp;
  j.description_ = "sinusoidal_bounded";
  return j;
}

JumpRateModel JumpRateModel::custom(Fn fn, double lambda1, double lambda2, double lambda_j, int d,
                                    std::string description) {
  require(static_cast<bool>(fn), "custom rate: missing evaluator");
  require(lambda1 > 0.0 && lambda1 <= lambda2 && std::isfinite(lambda2),
          "custom rate: need 0 < lambda1 <= lambda2");
  require(lambda_j >= 0.0 && std::isfinite(lambda_j), "custom rate: lambdaJ must be >= 0");
  JumpRateModel j;
  j.fn_ = std::move(fn);
  j.lambda1_ = lambda1;
  j.lambda2_ = lambda2;
  j.lambda_j_ = lambda_j;
  j.description_ = std::move(description);
  const std::string violation = j.spot_check(d);
  if (!violation.empty()) throw InvalidArgument("custom rate rejected: " + violation);
  return j;
}

std::string JumpRateModel::spot_check(int d, std::uint64_t seed, int n_probes) const {
  Stream s(seed);
  auto random_point = [&](Vector& x, Vector& v) {
    const double rx = std::pow(10.0, -3.0 + 6.0 * s.uniform());
    const double rv = std::pow(10.0, -3.0 + 6.0 * s.uniform());
    x = rx * s.direction(d);
    v = rv * s.direction(d);
  };
  Vector x, v, x2, v2;
  for (int i = 0; i < n_probes; ++i) {
    random_point(x, v);
    const double a = fn_(x, v);
    if (!(a >= lambda1_ * (1.0 - 1e-12) && a <= lambda2_ * (1.0 + 1e-12))) {
      std::ostringstream os;
      os << "J = " << a << " outside [" << lambda1_ << ", " << lambda2_ << "] at |x| = " << x.norm()
         << ", |v| = " << v.norm();
      return os.str();
    }
    if (i % 2 == 0) {
      const double scale = std::pow(10.0, -4.0 + 4.0 * s.uniform());
      x2 = x + scale * s.direction(d);
      v2 = v + scale * s.uniform() * s.direction(d);
    } else {
      random_point(x2, v2);
    }
    const double b = fn_(x2, v2);
    const double dist = (x - x2).norm() + (v - v2).norm();
    if (std::abs(a - b) > lambda_j_ * dist * (1.0 + 1e-9) + 1e-12) {
      std::ostringstream os;
      os << "|J - J'| = " << std::abs(a - b) << " exceeds lambdaJ * distance = " << lambda_j_ * dist;
      return os.str();
    }
  }
  return {};
}

void ModelSpec::validate() const {
  require(d >= 1, "model: d must be >= 1");
  require(gamma > 0.0 && std::isfinite(gamma), "model: gamma must be > 0");
  require(density.dim() == d, "model: density dimension differs from d");
  require(rate.lambda1() > 0.0 && rate.lambda1() <= rate.lambda2(), "model: need 0 < lambda1 <= lambda2");
}

// ---------------------------------------------------------------------------
// Overlap

double psi(const DensityModel& phi, const Vector& xi, const Vector& u) {
  require(xi.size() == u.size(), "psi: dimension mismatch");
  return std::min(phi.pdf(u), phi.pdf(u + xi));
}

double capital_psi(const DensityModel& phi, const Vector& xi, const Vector& u) {
  require(xi.size() == u.size(), "capital_psi: dimension mismatch");
  const double p = phi.pdf(u);
  return p - std::min(p, phi.pdf(u + xi));
}

Estimate overlap_A(const DensityModel& phi, double xi_norm, std::size_t n_samples, Stream& stream) {
  require(n_samples >= 1, "overlap_A: n_samples must be >= 1");
  require(xi_norm >= 0.0 && std::isfinite(xi_norm), "overlap_A: |xi| must be finite and >= 0");
  if (xi_norm == 0.0) return {1.0, 0.0};
  Vector xi = Vector::Zero(phi.dim());
  xi(0) = xi_norm;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double a = phi.overlap_ratio(phi.sample(stream), xi);
    sum += a;
    sum2 += a * a;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0)) : 0.0;
  return {mean, std::sqrt(var / n)};
}

double overlap_A_quadrature(const DensityModel& phi, double xi_norm) {
  require(xi_norm >= 0.0 && std::isfinite(xi_norm), "overlap_A_quadrature: bad |xi|");
  if (xi_norm == 0.0) return 1.0;
  const double h = 0.5 * xi_norm;
  const int d = phi.dim();
  if (d == 1) return 1.0 - phi.radial_cdf(h);
  // 2 P(<u,e> > h) = int_{h}^{inf} f_R(rho) I_{1 - (h/rho)^2}((d-1)/2, 1/2) d rho
  const double a = 0.5 * (d - 1);
  auto integrand = [&](double y) {
    const double rho = h + y;
    const double t = h / rho;
    const double x = (1.0 - t) * (1.0 + t);
    if (x <= 0.0) return 0.0;
    return phi.radial_pdf(rho) * boost::math::ibeta(a, 0.5, x);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0.0;
  const double value = integrator.integrate(integrand, std::sqrt(std::numeric_limits<double>::epsilon()), &err);
  return std::clamp(value, 0.0, 1.0);
}

std::vector<double> default_radius_grid(double kappa, std::size_t n, double lo_fraction) {
  require(kappa > 0.0 && n >= 1 && lo_fraction > 0.0 && lo_fraction <= 1.0, "default_radius_grid: bad input");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = kappa;
    return g;
  }
  const double l0 = std::log(lo_fraction);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = kappa * std::exp(l0 * (1.0 - static_cast<double>(i) / static_cast<double>(n - 1)));
  }
  g.back() = kappa;
  return g;
}

OverlapConstants estimate_overlap_constants(const DensityModel& phi, double alpha, double kappa,
                                            const std::vector<double>& grid, std::size_t n_samples,
                                            Stream& stream) {
  require(alpha > 0.0 && kappa > 0.0, "estimate_overlap_constants: alpha, kappa must be > 0");
  require(!grid.empty(), "estimate_overlap_constants: empty radius grid");
  for (double r : grid) {
    require(std::isfinite(r) && r > 0.0 && r <= kappa * (1.0 + 1e-12),
            "estimate_overlap_constants: radii must lie in (0, kappa]");
  }
  OverlapConstants out;
  out.c_star = std::numeric_limits<double>::infinity();
  out.c_star_mc = std::numeric_limits<double>::infinity();
  out.c_upper_star = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    OverlapRow row;
    row.radius = grid[i];
    row.xi_norm = alpha * std::min(grid[i], kappa);
    Stream s = stream.split(i);
    row.mc = overlap_A(phi, row.xi_norm, n_samples, s);
    row.quadrature = overlap_A_quadrature(phi, row.xi_norm);
    const double mc_lower = row.mc.mean - 3.0 * row.mc.se;
    out.c_star_mc = std::min(out.c_star_mc, mc_lower);
    // quadrature error is far below 1e-6 relative
    out.c_star = std::min(out.c_star, std::max(mc_lower, row.quadrature * (1.0 - 1e-6)));
    out.c_upper_star =
        std::max(out.c_upper_star, (1.0 - row.mc.mean + 3.0 * row.mc.se) / row.radius);
    out.rows.push_back(row);
  }
  out.c_star = std::min(out.c_star, 1.0);
  return out;
}

}  // namespace dhpdmp
