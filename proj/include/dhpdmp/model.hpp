#ifndef DHPDMP_MODEL_HPP
#define DHPDMP_MODEL_HPP

#include <functional>
#include <string>
#include <vector>

#include "dhpdmp/density.hpp"
#include "dhpdmp/random.hpp"
#include "dhpdmp/types.hpp"

namespace dhpdmp {

// ---------------------------------------------------------------------------
// Vector primitives

/// (z)_kappa: z capped at norm kappa, direction kept; 0 for z = 0.
template <typename Derived>
VectorX<typename Derived::Scalar> truncate(const Eigen::MatrixBase<Derived>& z,
                                           typename Derived::Scalar kappa) {
  using Scalar = typename Derived::Scalar;
  require(kappa > Scalar(0), "truncate: kappa must be > 0");
  require(z.allFinite(), "truncate: non-finite input");
  const Scalar n = z.norm();
  if (n <= kappa) return z;
  return (kappa / n) * z;
}

/// Householder reflection about `axis` applied to u: u - 2<u,e>e with
/// e = axis/|axis|, and -u when axis = 0. No matrix is formed.
template <typename DerivedA, typename DerivedU>
VectorX<typename DerivedU::Scalar> reflect(const Eigen::MatrixBase<DerivedA>& axis,
                                           const Eigen::MatrixBase<DerivedU>& u) {
  using Scalar = typename DerivedU::Scalar;
  require(axis.size() == u.size(), "reflect: dimension mismatch");
  const Scalar n2 = axis.squaredNorm();
  if (n2 == Scalar(0)) return -u;
  return u - (Scalar(2) * axis.dot(u) / n2) * axis;
}

// ---------------------------------------------------------------------------
// Model ingredients

class PotentialModel {
 public:
  enum class Kind { quadratic, custom };

  using ValueFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;

  /// U(x) = theta |x|^2. theta = 0 is accepted for the free damped flow.
  static PotentialModel quadratic(double theta);
  /// User potential; `grad_lipschitz` bounds the Lipschitz constant of grad U
  /// and `k_beta` (optional) evaluates K_{beta,U}.
  static PotentialModel custom(ValueFn value, GradFn grad, double grad_lipschitz,
                               std::function<double(double)> k_beta = {});

  Kind kind() const { return kind_; }
  bool is_quadratic() const { return kind_ == Kind::quadratic; }
  double theta() const { return theta_; }
  double grad_lipschitz() const { return lipschitz_; }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  /// Smallest K with |beta (x - x') + grad U(x') - grad U(x)| <= K |x - x'|.
  double k_beta(double beta) const;

 private:
  Kind kind_ = Kind::quadratic;
  double theta_ = 0.0;
  double lipschitz_ = 0.0;
  ValueFn value_;
  GradFn grad_;
  std::function<double(double)> k_beta_;
};

class JumpRateModel {
 public:
  using Fn = std::function<double(const Vector& x, const Vector& v)>;

  static JumpRateModel constant(double lambda);
  /// (l1 + l2)/2 + (l2 - l1)/2 sin(|x| + |v|); Lipschitz constant (l2 - l1)/2.
  static JumpRateModel sinusoidal(double lambda1, double lambda2);
  /// Declared bounds are spot-checked on random probes in dimension d;
  /// violations throw InvalidArgument.
  static JumpRateModel custom(Fn fn, double lambda1, double lambda2, double lambda_j, int d,
                              std::string description = "custom");

  double operator()(const Vector& x, const Vector& v) const { return fn_(x, v); }
  double operator()(const State& s) const { return fn_(s.x, s.v); }
  double lambda1() const { return lambda1_; }
  double lambda2() const { return lambda2_; }
  double lambda_j() const { return lambda_j_; }
  bool is_constant() const { return constant_; }
  const std::string& description() const { return description_; }

  /// Probe check of bounds and Lipschitz constant; returns the first
  /// violation message or an empty string.
  std::string spot_check(int d, std::uint64_t seed = 0x5eed, int n_probes = 2000) const;

 private:
  Fn fn_;
  double lambda1_ = 1.0;
  double lambda2_ = 1.0;
  double lambda_j_ = 0.0;
  bool constant_ = false;
  std::string description_;
};

struct ModelSpec {
  int d = 1;
  double gamma = 1.0;
  PotentialModel potential = PotentialModel::quadratic(1.0);
  JumpRateModel rate = JumpRateModel::constant(1.0);
  DensityModel density = DensityModel::gaussian(1);

  /// Throws InvalidArgument on inconsistent ingredients.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Overlap densities

/// psi_xi(u) = min(phi(u), phi(u + xi)).
double psi(const DensityModel& phi, const Vector& xi, const Vector& u);
/// Psi_xi(u) = phi(u) - psi_xi(u).
double capital_psi(const DensityModel& phi, const Vector& xi, const Vector& u);

/// Monte Carlo estimate of A = int psi_xi(u) du for |xi| = xi_norm, using
/// u ~ phi and the ratio min(1, phi(u+xi)/phi(u)).
Estimate overlap_A(const DensityModel& phi, double xi_norm, std::size_t n_samples, Stream& stream);

/// Deterministic value of the same integral. For radial non-increasing phi,
/// min(phi(u), phi(u+xi)) picks phi at the point farther from the origin,
/// which splits R^d along the bisecting hyperplane; hence
/// A = 2 P(<u, e> > |xi|/2), computed by quadrature over the radial law.
double overlap_A_quadrature(const DensityModel& phi, double xi_norm);

struct OverlapRow {
  double radius = 0.0;   // r in the grid
  double xi_norm = 0.0;  // alpha min(r, kappa)
  Estimate mc;
  double quadrature = 0.0;
};

struct OverlapConstants {
  double c_star = 0.0;        // lower bound on A over the grid
  double c_upper_star = 0.0;  // upper bound on (1 - A)/r over the grid
  double c_star_mc = 0.0;     // MC-only lower bound (may be <= 0 far out)
  std::vector<OverlapRow> rows;
};

/// Certifies the overlap constants on a finite radius grid with a
/// 3-standard-error margin. c_star takes the larger of the MC lower bound
/// and the quadrature value (which stays resolvable where MC underflows).
OverlapConstants estimate_overlap_constants(const DensityModel& phi, double alpha, double kappa,
                                            const std::vector<double>& grid, std::size_t n_samples,
                                            Stream& stream);

/// Geometric radius grid on [kappa * lo_fraction, kappa] with n points.
std::vector<double> default_radius_grid(double kappa, std::size_t n = 24, double lo_fraction = 1e-3);

}  // namespace dhpdmp

#endif  // DHPDMP_MODEL_HPP
