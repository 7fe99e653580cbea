#ifndef DHPDMP_DENSITY_HPP
#define DHPDMP_DENSITY_HPP

#include <string>

#include "dhpdmp/random.hpp"
#include "dhpdmp/types.hpp"

namespace dhpdmp {

enum class DensityKind { standard_gaussian, heavy_tail, stretched_exp };

std::string to_string(DensityKind k);
DensityKind density_kind_from_string(const std::string& s);

/// Radial collision density on R^d.
///
///   standard_gaussian   (2 pi)^{-d/2} exp(-|u|^2 / 2)
///   heavy_tail(b)       c (1 + |u|)^{-d-b}
///   stretched_exp(b)    c exp(-|u|^b)
///
/// All three are strictly positive, bounded and non-increasing in |u|.
/// Sampling is exact: a uniform direction times a radius drawn from the
/// radial law (normal vector, gamma transform, inverse CDF respectively).
class DensityModel {
 public:
  static DensityModel gaussian(int d);
  static DensityModel heavy_tail(int d, double beta1);
  static DensityModel stretched_exp(int d, double beta2);
  static DensityModel make(DensityKind kind, int d, double param);

  DensityKind kind() const { return kind_; }
  int dim() const { return d_; }
  /// Shape parameter (beta1 or beta2; 2 for the Gaussian).
  double param() const { return param_; }
  /// c_{d,beta}
  double normalizer() const { return std::exp(log_norm_); }

  /// log phi(u) as a function of r = |u|.
  double log_pdf_radius(double r) const;
  double pdf_radius(double r) const { return std::exp(log_pdf_radius(r)); }
  double log_pdf(const Vector& u) const { return log_pdf_radius(u.norm()); }
  double pdf(const Vector& u) const { return pdf_radius(u.norm()); }

  /// min(1, phi(u + xi) / phi(u)), the acceptance ratio of the overlap split.
  double overlap_ratio(const Vector& u, const Vector& xi) const;

  /// Law of |u|.
  double radial_pdf(double r) const;
  double radial_cdf(double r) const;
  double sample_radius(Stream& s) const;
  Vector sample(Stream& s) const;

  /// E|u|^order; +infinity when the moment diverges.
  double moment(double order) const;

  /// Moment order beta used by the Lyapunov machinery and m_beta = E|u|^beta.
  double moment_order_beta() const { return moment_order_; }
  double m_beta() const { return moment(moment_order_); }
  DensityModel with_moment_order(double beta) const;

 private:
  DensityModel(DensityKind k, int d, double p);

  DensityKind kind_;
  int d_;
  double param_;
  double log_norm_;
  double moment_order_;
};

/// log |S^{d-1}|, the surface area of the unit sphere.
double log_sphere_area(int d);

}  // namespace dhpdmp

#endif  // DHPDMP_DENSITY_HPP
