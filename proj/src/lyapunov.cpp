#include "dhpdmp/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dhpdmp/parallel.hpp"
#include "dhpdmp/random.hpp"
#include "dhpdmp/stats.hpp"

namespace dhpdmp {

LyapunovFunction LyapunovFunction::for_model(const ModelSpec& model, double beta_exp) {
  require(beta_exp > 0.0 && beta_exp <= 2.0, "Lyapunov exponent beta must lie in (0, 2]");
  const double l1 = model.rate.lambda1();
  const double l2 = model.rate.lambda2();
  const double g = model.gamma;
  LyapunovFunction w;
  w.theta0_ = (l1 + g) * (l1 + g) / 4.0;
  w.theta_star_ = (l1 + g) * (l1 + g) / (2.0 * (l2 + g));
  w.beta_exp_ = beta_exp;
  w.potential_ = model.potential;
  return w;
}

double LyapunovFunction::w0(const Vector& x, const Vector& v) const {
  return 1.0 + 2.0 * potential_.value(x) + theta0_ * x.squaredNorm() + v.squaredNorm() +
         theta_star_ * x.dot(v);
}

double LyapunovFunction::operator()(const Vector& x, const Vector& v) const {
  const double base = w0(x, v);
  return beta_exp_ == 2.0 ? base : std::pow(base, exponent());
}

Vector LyapunovFunction::grad_x_w0(const Vector& x, const Vector& v) const {
  return 2.0 * potential_.gradient(x) + 2.0 * theta0_ * x + theta_star_ * v;
}

Vector LyapunovFunction::grad_v_w0(const Vector& x, const Vector& v) const {
  return 2.0 * v + theta_star_ * x;
}

double LyapunovFunction::inf_over_v(const Vector& x) const {
  const double base = 1.0 + 2.0 * potential_.value(x) +
                      (theta0_ - theta_star_ * theta_star_ / 4.0) * x.squaredNorm();
  return std::pow(base, exponent());
}

double LyapunovFunction::liouville(const Vector& x, const Vector& v, double gamma) const {
  const double d0 = grad_x_w0(x, v).dot(v) - grad_v_w0(x, v).dot(gamma * v + potential_.gradient(x));
  const double p = exponent();
  if (p == 1.0) return d0;
  return p * std::pow(w0(x, v), p - 1.0) * d0;
}

double LyapunovFunction::sublevel_radius(double level) const {
  require(level > 0.0 && std::isfinite(level), "sublevel_radius: level must be finite and > 0");
  const double l = std::pow(level, 1.0 / exponent()) - 1.0;
  if (l <= 0.0) return 0.0;
  const double a = theta0_ + (potential_.is_quadratic() ? 2.0 * potential_.theta() : 0.0);
  const double det = a - theta_star_ * theta_star_ / 4.0;
  return std::sqrt(l * (1.0 + a + theta_star_) / det);
}

double drift_threshold_c0_star(double lambda1, double lambda2, double gamma) {
  const double s = lambda1 + gamma;
  const double den = 4.0 * (2.0 * lambda1 * lambda2 - lambda1 * lambda1 + 4.0 * lambda2 * gamma +
                            3.0 * gamma * gamma);
  return s * s * (lambda2 - lambda1) * (lambda2 - lambda1) / den;
}

double jump_part_closed_form(const ModelSpec& model, const LyapunovFunction& w, const Vector& x,
                             const Vector& v) {
  const double m2 = model.density.moment(2.0);
  return model.rate(x, v) * (m2 - v.squaredNorm() - w.theta_star() * x.dot(v));
}

double generator_w0_closed_form(const ModelSpec& model, const LyapunovFunction& w, const Vector& x,
                                const Vector& v) {
  require(w.beta_exp() == 2.0, "generator_w0_closed_form: needs beta = 2");
  return w.liouville(x, v, model.gamma) + jump_part_closed_form(model, w, x, v);
}

namespace {

/// Points per axis so that the 2d-dimensional grid stays below max_nodes.
int axis_points(int d, const DriftOptions& opts) {
  int n = std::max(3, opts.points_per_axis | 1);
  while (n > 3 && std::pow(static_cast<double>(n), 2.0 * d) > static_cast<double>(opts.max_nodes)) n -= 2;
  return n;
}

/// All points of the cube [-h, h]^d grid with n points per axis inside the ball of radius h.
std::vector<Vector> ball_grid(int d, int n, double h) {
  std::vector<Vector> out;
  std::vector<int> idx(d, 0);
  const double step = n > 1 ? 2.0 * h / (n - 1) : 0.0;
  for (;;) {
    Vector p(d);
    for (int k = 0; k < d; ++k) p[k] = -h + step * idx[k];
    if (p.norm() <= h * (1.0 + 1e-12)) out.push_back(std::move(p));
    int k = 0;
    while (k < d && ++idx[k] == n) idx[k++] = 0;
    if (k == d) break;
  }
  return out;
}

std::string grid_text(int d, int n, double h, std::size_t nodes) {
  std::ostringstream os;
  os << n << " points per axis on [-" << h << ", " << h << "]^" << 2 * d << ", restricted to |x|, |v| <= "
     << h << " (" << nodes << " nodes)";
  return os.str();
}

/// Reduced coordinates for quadratic U: |x| = rho, |v| = s, cos angle = c.
struct Reduced {
  double a;       // 2 theta + theta0
  double ts;      // theta*
  double theta;
  double gamma;
  double theta0;

  double w0(double rho, double s, double c) const { return 1.0 + a * rho * rho + s * s + ts * rho * s * c; }
  double d0(double rho, double s, double c) const {
    return (2.0 * theta0 - ts * gamma) * rho * s * c - (2.0 * gamma - ts) * s * s -
           2.0 * theta * ts * rho * rho;
  }
};

std::vector<double> cos_grid(int d) {
  if (d == 1) return {-1.0, 1.0};
  std::vector<double> c;
  for (int i = 0; i <= 40; ++i) c.push_back(-1.0 + i / 20.0);
  return c;
}

}  // namespace

DriftReport lyapunov_drift_quadratic(const ModelSpec& model, const DriftOptions& opts) {
  model.validate();
  if (!model.potential.is_quadratic()) throw Unsupported("closed-form drift needs a quadratic potential");
  const double m2 = model.density.moment(2.0);
  if (!std::isfinite(m2)) throw Unsupported("closed-form drift needs a finite second moment of phi");

  const LyapunovFunction w = LyapunovFunction::for_model(model, 2.0);
  const double theta = model.potential.theta();
  const double g = model.gamma;
  const double t0 = w.theta0();
  const double ts = w.theta_star();
  const double a = 2.0 * theta + t0;
  const double l1 = model.rate.lambda1();
  const double l2 = model.rate.lambda2();

  DriftReport rep;
  rep.method = "closed-form";
  rep.beta_exp = 2.0;
  rep.c0_star_threshold = drift_threshold_c0_star(l1, l2, g);
  rep.threshold_warning = theta <= rep.c0_star_threshold;
  if (rep.threshold_warning) rep.notes.push_back("theta <= c0*: growth condition on U not met");

  // L W0 + c0 W0 is affine in J, so J in {lambda1, lambda2} suffices; its
  // quadratic part A_xx |x|^2 + A_vv |v|^2 + A_xv <x,v> must be <= 0.
  auto tail_ok = [&](double c0) {
    for (double j : {l1, l2}) {
      const double axx = -2.0 * theta * ts + c0 * a;
      const double avv = -(2.0 * g - ts) - j + c0;
      const double axv = (2.0 * t0 - ts * g) - j * ts + c0 * ts;
      if (axx > 0.0 || avv > 0.0 || axx * avv < axv * axv / 4.0) return false;
    }
    return true;
  };
  double c0 = opts.c0_initial;
  int halvings = 0;
  while (!tail_ok(c0) && halvings < opts.max_halvings) {
    c0 /= 2.0;
    ++halvings;
  }
  if (!tail_ok(c0)) {
    rep.notes.push_back("no c0 > 0 makes the quadratic part negative semidefinite");
    return rep;
  }
  rep.tail_certified = true;
  rep.c0 = c0;
  rep.C0 = l2 * m2 + c0;
  rep.r_star = w.sublevel_radius(4.0 * rep.C0 / c0);

  const int n = axis_points(model.d, opts);
  const double h = opts.box_factor * rep.r_star;
  const auto xs = ball_grid(model.d, n, h);
  const auto vs = ball_grid(model.d, n, h);
  rep.grid_half_width = h;
  rep.grid_nodes = xs.size() * vs.size();
  rep.grid_description = grid_text(model.d, n, h, rep.grid_nodes);

  std::vector<double> worst(xs.size(), std::numeric_limits<double>::infinity());
  parallel_for(xs.size(), [&](std::size_t i) {
    const Vector& x = xs[i];
    for (const Vector& v : vs) {
      const double lw = generator_w0_closed_form(model, w, x, v);
      const double wv = w.w0(x, v);
      const double margin = rep.C0 - c0 * wv - lw;
      worst[i] = std::min(worst[i], margin / std::max(1.0, rep.C0 + c0 * wv));
    }
  });
  rep.min_margin = *std::min_element(worst.begin(), worst.end());

  for (const Vector& x : xs) {
    JumpNode node;
    node.x = x;
    node.closed_form = 1.0 + 2.0 * model.potential.value(x) + t0 * x.squaredNorm() + m2;
    node.integral = {node.closed_form, 0.0};
    rep.jump_nodes.push_back(std::move(node));
  }
  rep.valid = rep.tail_certified && rep.min_margin >= -1e-9;
  return rep;
}

DriftReport lyapunov_drift_mc(const ModelSpec& model, double beta_exp, const DriftOptions& opts) {
  model.validate();
  require(beta_exp > 0.0 && beta_exp <= 2.0, "drift: beta must lie in (0, 2]");
  if (!model.potential.is_quadratic()) throw Unsupported("drift certificate needs a quadratic potential");
  require(opts.n_mc >= 2, "drift: n_mc must be >= 2");
  const DensityModel& phi = model.density;
  const double m_beta = phi.moment(beta_exp);
  if (!std::isfinite(m_beta)) throw Unsupported("drift: E|u|^beta diverges for this density");
  const double p = beta_exp / 2.0;
  const double m_p = phi.moment(p);
  const double m2 = phi.moment(2.0);

  const LyapunovFunction w = LyapunovFunction::for_model(model, beta_exp);
  const double theta = model.potential.theta();
  const double l1 = model.rate.lambda1();
  const double l2 = model.rate.lambda2();
  const Reduced red{2.0 * theta + w.theta0(), w.theta_star(), theta, model.gamma, w.theta0()};

  DriftReport rep;
  rep.method = "MC";
  rep.beta_exp = beta_exp;
  rep.c0_star_threshold = drift_threshold_c0_star(l1, l2, model.gamma);
  rep.threshold_warning = theta <= rep.c0_star_threshold;
  if (rep.threshold_warning) rep.notes.push_back("theta <= c0*: growth condition on U not met");

  // Upper bound on int W(x,u) phi(u) du depending on |x| only: Jensen when
  // m2 is finite, otherwise subadditivity of t -> t^p applied to
  // (1 + a|x|^2) + |u|^2 + theta* |x||u|.
  auto jump_bound = [&](double rho) {
    const double base = 1.0 + red.a * rho * rho;
    double b = std::pow(base, p) + m_beta + std::pow(red.ts * rho, p) * m_p;
    if (std::isfinite(m2)) b = std::min(b, std::pow(base + m2, p));
    return b;
  };

  std::vector<double> thetas;
  for (int i = 0; i <= 90; ++i) thetas.push_back(std::numbers::pi / 2.0 * i / 90.0);
  const std::vector<double> cs = cos_grid(model.d);

  // Leading-order coefficient of L W + c0 W along rays (rho, s) = R (cos t, sin t):
  // every term is homogeneous of degree 2p, the jump bound contributing (a rho^2)^p.
  auto leading_max = [&](double c0) {
    double worst = -std::numeric_limits<double>::infinity();
    for (double t : thetas) {
      const double rho = std::cos(t), s = std::sin(t);
      for (double c : cs) {
        const double wh = red.a * rho * rho + s * s + red.ts * rho * s * c;
        const double dh = red.d0(rho, s, c);
        const double whp = std::pow(wh, p);
        for (double j : {l1, l2}) {
          const double gval =
              p * std::pow(wh, p - 1.0) * dh + j * (std::pow(red.a * rho * rho, p) - whp) + c0 * whp;
          worst = std::max(worst, gval);
        }
      }
    }
    return worst;
  };
  double c0 = opts.c0_initial;
  int halvings = 0;
  while (!(leading_max(c0) < 0.0) && halvings < opts.max_halvings) {
    c0 /= 2.0;
    ++halvings;
  }
  if (!(leading_max(c0) < 0.0)) {
    rep.notes.push_back("leading-order drift coefficient is not negative for any c0");
    return rep;
  }
  rep.tail_certified = true;
  rep.c0 = c0;

  // Far-field scan in reduced coordinates with the analytic jump bound.
  std::vector<double> scales{0.0};
  for (int i = 0; i <= 240; ++i) scales.push_back(std::pow(10.0, -3.0 + 12.0 * i / 240.0));
  auto scan_max = [&](double r_min) {
    double best = -std::numeric_limits<double>::infinity();
    for (double sc : scales) {
      if (sc < r_min) continue;
      for (double t : thetas) {
        const double rho = sc * std::cos(t), s = sc * std::sin(t);
        const double ib = jump_bound(rho);
        for (double c : cs) {
          const double wv = red.w0(rho, s, c);
          const double wp = std::pow(wv, p);
          const double lv = p * std::pow(wv, p - 1.0) * red.d0(rho, s, c);
          for (double j : {l1, l2}) best = std::max(best, lv + j * (ib - wp) + c0 * wp);
        }
      }
    }
    return best;
  };
  const double c0_pre = scan_max(0.0);
  const double r_pre = w.sublevel_radius(4.0 * c0_pre / c0);

  // Common random numbers for every x node.
  Stream stream(opts.seed);
  const int d = model.d;
  Eigen::MatrixXd us(d, static_cast<Eigen::Index>(opts.n_mc));
  for (Eigen::Index k = 0; k < us.cols(); ++k) us.col(k) = phi.sample(stream);
  const Eigen::VectorXd u2 = us.colwise().squaredNorm().transpose();

  const int n = axis_points(d, opts);
  const double h = opts.box_factor * r_pre;
  const auto xs = ball_grid(d, n, h);
  const auto vs = ball_grid(d, n, h);
  rep.grid_half_width = h;
  rep.grid_nodes = xs.size() * vs.size();
  rep.grid_description = grid_text(d, n, h, rep.grid_nodes);

  rep.jump_nodes.resize(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) {
    const Vector& x = xs[i];
    const double base = 1.0 + 2.0 * model.potential.value(x) + w.theta0() * x.squaredNorm();
    const Eigen::VectorXd xu = us.transpose() * x;
    Accumulator acc;
    for (Eigen::Index k = 0; k < us.cols(); ++k) {
      const double v0 = base + u2[k] + w.theta_star() * xu[k];
      acc.add(p == 1.0 ? v0 : std::pow(v0, p));
    }
    JumpNode& node = rep.jump_nodes[i];
    node.x = x;
    node.integral = acc.estimate();
    node.closed_form = std::isfinite(m2) ? base + m2 : std::numeric_limits<double>::quiet_NaN();
  });

  double max_rel_se = 0.0;
  for (const auto& node : rep.jump_nodes) {
    if (!std::isfinite(node.integral.mean) || !std::isfinite(node.integral.se)) {
      max_rel_se = std::numeric_limits<double>::infinity();
      break;
    }
    max_rel_se = std::max(max_rel_se, node.integral.se / node.integral.mean);
  }
  rep.inconclusive = !(max_rel_se <= opts.max_relative_se);
  if (rep.inconclusive) rep.notes.push_back("relative standard error of the jump integral too large");

  // L W + c0 W on the grid with the jump integral at its 3-se upper value.
  std::vector<double> grid_max(xs.size(), -std::numeric_limits<double>::infinity());
  parallel_for(xs.size(), [&](std::size_t i) {
    const Vector& x = xs[i];
    const double iu = rep.jump_nodes[i].integral.mean + 3.0 * rep.jump_nodes[i].integral.se;
    for (const Vector& v : vs) {
      const double wv = w(x, v);
      const double lw = w.liouville(x, v, model.gamma) + model.rate(x, v) * (iu - wv);
      grid_max[i] = std::max(grid_max[i], lw + c0 * wv);
    }
  });
  const double gmax = *std::max_element(grid_max.begin(), grid_max.end());
  rep.C0 = std::max(gmax, scan_max(h));
  rep.r_star = w.sublevel_radius(4.0 * rep.C0 / c0);

  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) worst = std::min(worst, rep.C0 - grid_max[i]);
  rep.min_margin = worst;
  rep.valid = rep.tail_certified && !rep.inconclusive && rep.min_margin >= 0.0 && std::isfinite(rep.C0);
  return rep;
}

B2Report verify_B2(const ModelSpec& model, const LyapunovFunction& w, const std::vector<double>& xi_grid,
                   const B2Options& opts) {
  model.validate();
  require(!xi_grid.empty(), "verify_B2: empty xi grid");
  for (double s : xi_grid) require(s > 0.0 && std::isfinite(s), "verify_B2: xi norms must be > 0");
  require(opts.n_mc >= 2, "verify_B2: n_mc must be >= 2");
  const DensityModel& phi = model.density;
  const int d = model.d;
  const double beta = w.beta_exp();

  Stream stream(opts.seed);
  std::vector<Vector> us(opts.n_mc);
  for (auto& u : us) u = phi.sample(stream);

  // 1 - min(1, phi(u + xi)/phi(u)) = Psi_xi(u) / phi(u), independent of x.
  std::vector<std::vector<double>> psi_frac(xi_grid.size(), std::vector<double>(us.size()));
  for (std::size_t j = 0; j < xi_grid.size(); ++j) {
    Vector xi = Vector::Zero(d);
    xi[0] = xi_grid[j];
    for (std::size_t k = 0; k < us.size(); ++k) psi_frac[j][k] = 1.0 - phi.overlap_ratio(us[k], xi);
  }

  B2Report rep;
  for (std::size_t j = 0; j < xi_grid.size(); ++j) {
    Accumulator acc;
    for (std::size_t k = 0; k < us.size(); ++k)
      acc.add(std::pow(us[k].norm(), beta) * psi_frac[j][k] / xi_grid[j]);
    B2Row row;
    row.x = Vector::Zero(d);
    row.xi_norm = xi_grid[j];
    row.ratio = acc.estimate();
    rep.moment.push_back(std::move(row));
  }

  std::vector<double> angles{0.0, std::numbers::pi};
  if (d >= 2) angles.insert(angles.begin() + 1, std::numbers::pi / 2.0);
  for (double rho : opts.x_radii) {
    require(rho >= 0.0 && std::isfinite(rho), "verify_B2: probe radii must be finite and >= 0");
    for (double ang : angles) {
      if (rho == 0.0 && ang != 0.0) continue;
      Vector x = Vector::Zero(d);
      x[0] = rho * std::cos(ang);
      if (d >= 2) x[1] = rho * std::sin(ang);
      const double inf_w = w.inf_over_v(x);
      std::vector<double> wx(us.size());
      for (std::size_t k = 0; k < us.size(); ++k) wx[k] = w(x, us[k]) / inf_w;

      Accumulator first;
      for (double val : wx) first.add(val);
      rep.first.push_back({x, 0.0, first.estimate()});
      for (std::size_t j = 0; j < xi_grid.size(); ++j) {
        Accumulator acc;
        for (std::size_t k = 0; k < us.size(); ++k) acc.add(wx[k] * psi_frac[j][k] / xi_grid[j]);
        rep.second.push_back({x, xi_grid[j], acc.estimate()});
      }
    }
  }

  bool finite = true;
  double best = 0.0, best_rel = 0.0;
  for (const auto* rows : {&rep.first, &rep.second}) {
    for (const auto& r : *rows) {
      finite = finite && std::isfinite(r.ratio.mean) && std::isfinite(r.ratio.se);
      const double up = r.ratio.mean + 3.0 * r.ratio.se;
      if (up > best) {
        best = up;
        best_rel = r.ratio.mean > 0.0 ? r.ratio.se / r.ratio.mean : 0.0;
      }
    }
  }
  for (const auto& r : rep.moment) {
    finite = finite && std::isfinite(r.ratio.mean) && std::isfinite(r.ratio.se);
    rep.c0_double_star = std::max(rep.c0_double_star, r.ratio.mean + 3.0 * r.ratio.se);
  }
  rep.c_double_star = best;
  rep.pass = finite && best > 0.0 && std::isfinite(best) && best_rel <= 0.25;
  return rep;
}

}  // namespace dhpdmp
