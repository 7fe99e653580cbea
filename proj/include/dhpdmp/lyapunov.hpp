#ifndef DHPDMP_LYAPUNOV_HPP
#define DHPDMP_LYAPUNOV_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dhpdmp/model.hpp"
#include "dhpdmp/types.hpp"

namespace dhpdmp {

/// W = W0^{beta/2} with
///   W0(x, v) = 1 + 2 U(x) + theta0 |x|^2 + |v|^2 + theta* <x, v>,
///   theta0 = (lambda1 + gamma)^2 / 4,  theta* = (lambda1 + gamma)^2 / (2 (lambda2 + gamma)).
class LyapunovFunction {
 public:
  static LyapunovFunction for_model(const ModelSpec& model, double beta_exp = 2.0);

  double theta0() const { return theta0_; }
  double theta_star() const { return theta_star_; }
  double beta_exp() const { return beta_exp_; }
  /// W = W0^exponent
  double exponent() const { return 0.5 * beta_exp_; }
  const PotentialModel& potential() const { return potential_; }

  double w0(const Vector& x, const Vector& v) const;
  double operator()(const Vector& x, const Vector& v) const;
  double operator()(const State& s) const { return (*this)(s.x, s.v); }

  Vector grad_x_w0(const Vector& x, const Vector& v) const;
  Vector grad_v_w0(const Vector& x, const Vector& v) const;

  /// inf over v of W(x, v), attained at v = -theta* x / 2.
  double inf_over_v(const Vector& x) const;

  /// Liouville part of the generator applied to W.
  double liouville(const Vector& x, const Vector& v, double gamma) const;

  /// sup |x| + |v| over {W <= level}. Uses the quadratic form
  /// theta0 |x|^2 + |v|^2 + theta* <x,v> (plus 2 theta |x|^2 for quadratic U),
  /// which is exact for quadratic U and an outer bound for any U >= 0.
  double sublevel_radius(double level) const;

 private:
  double theta0_ = 0.0;
  double theta_star_ = 0.0;
  double beta_exp_ = 2.0;
  PotentialModel potential_ = PotentialModel::quadratic(0.0);
};

/// Threshold c0* below which the sufficient growth condition on U fails:
/// (l1 + g)^2 (l2 - l1)^2 / (4 (2 l1 l2 - l1^2 + 4 l2 g + 3 g^2)).
double drift_threshold_c0_star(double lambda1, double lambda2, double gamma);

/// Jump part of L W0 in closed form, J(x,v) (m2 - |v|^2 - theta* <x,v>).
double jump_part_closed_form(const ModelSpec& model, const LyapunovFunction& w, const Vector& x,
                             const Vector& v);

/// Full generator L W0 in closed form (beta_exp = 2).
double generator_w0_closed_form(const ModelSpec& model, const LyapunovFunction& w, const Vector& x,
                                const Vector& v);

struct DriftOptions {
  int points_per_axis = 41;
  std::size_t max_nodes = 41ull * 41ull * 41ull * 41ull;
  double box_factor = 3.0;  // grid covers |x|, |v| <= box_factor R*
  std::size_t n_mc = 100000;
  double c0_initial = 1.0;
  int max_halvings = 60;
  std::uint64_t seed = 1;
  double max_relative_se = 0.05;
};

/// Jump integral int W(x, u) phi(u) du at one grid position.
struct JumpNode {
  Vector x;
  Estimate integral;
  double closed_form = 0.0;  // only for beta_exp = 2
};

struct DriftReport {
  std::string method;  // "closed-form" | "MC"
  double beta_exp = 2.0;
  double c0 = 0.0;
  double C0 = 0.0;
  double r_star = 0.0;
  double min_margin = 0.0;  // min over grid of -LW + C0 - c0 W
  bool tail_certified = false;
  bool inconclusive = false;
  bool valid = false;
  std::string grid_description;
  std::size_t grid_nodes = 0;
  double grid_half_width = 0.0;
  double c0_star_threshold = 0.0;
  bool threshold_warning = false;
  std::vector<std::string> notes;
  std::vector<JumpNode> jump_nodes;
};

/// Certificate L W0 <= -c0 W0 + C0 for quadratic U using the closed-form
/// generator: c0 halves from c0_initial until the quadratic part is
/// negative semidefinite for both rate extremes; C0 is the resulting exact
/// supremum; the certificate is then checked on the position-velocity grid.
DriftReport lyapunov_drift_quadratic(const ModelSpec& model, const DriftOptions& opts = {});

/// Same certificate for W = W0^{beta/2}, beta in (0, 2], with the jump
/// integral estimated by Monte Carlo (3 standard-error margin) at every
/// grid position and an analytic upper bound on it in the far field.
DriftReport lyapunov_drift_mc(const ModelSpec& model, double beta_exp, const DriftOptions& opts = {});

struct B2Options {
  std::vector<double> x_radii = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0};
  std::size_t n_mc = 100000;
  std::uint64_t seed = 2;
};

struct B2Row {
  Vector x;
  double xi_norm = 0.0;  // 0 for the first inequality
  Estimate ratio;
};

struct B2Report {
  double c_double_star = 0.0;    // max ratio + 3 se over both inequalities
  double c0_double_star = 0.0;   // max of int |u|^beta Psi_xi / |xi| + 3 se
  bool pass = false;
  std::vector<B2Row> first;      // int W(x,u) phi / inf_v W(x,v)
  std::vector<B2Row> second;     // int W(x,u) Psi_xi / (inf_v W(x,v) |xi|)
  std::vector<B2Row> moment;     // int |u|^beta Psi_xi / |xi|
};

/// Estimates the constant c** of both overlap-weighted moment inequalities
/// on probe positions and a grid of nonzero shifts xi.
B2Report verify_B2(const ModelSpec& model, const LyapunovFunction& w, const std::vector<double>& xi_grid,
                   const B2Options& opts = {});

}  // namespace dhpdmp

#endif  // DHPDMP_LYAPUNOV_HPP
