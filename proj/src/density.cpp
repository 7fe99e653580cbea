#include "dhpdmp/density.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace dhpdmp {

std::string to_string(DensityKind k) {
  switch (k) {
    case DensityKind::standard_gaussian: return "standard_gaussian";
    case DensityKind::heavy_tail: return "heavy_tail";
    case DensityKind::stretched_exp: return "stretched_exp";
  }
  return "unknown";
}

DensityKind density_kind_from_string(const std::string& s) {
  if (s == "standard_gaussian" || s == "gaussian") return DensityKind::standard_gaussian;
  if (s == "heavy_tail") return DensityKind::heavy_tail;
  if (s == "stretched_exp") return DensityKind::stretched_exp;
  throw InvalidArgument("unknown density kind '" + s + "'");
}

double log_sphere_area(int d) {
  const double dd = d;
  return std::log(2.0) + 0.5 * dd * std::log(std::numbers::pi) - std::lgamma(0.5 * dd);
}

namespace {
double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }
}  // namespace

DensityModel::DensityModel(DensityKind k, int d, double p)
    : kind_(k), d_(d), param_(p), log_norm_(0.0), moment_order_(2.0) {
  require(d >= 1, "density: dimension must be >= 1");
  const double dd = d;
  switch (k) {
    case DensityKind::standard_gaussian:
      log_norm_ = -0.5 * dd * std::log(2.0 * std::numbers::pi);
      break;
    case DensityKind::stretched_exp:
      require(p > 0.0 && std::isfinite(p), "stretched_exp: beta2 must be > 0");
      log_norm_ = std::log(p) - log_sphere_area(d) - std::lgamma(dd / p);
      break;
    case DensityKind::heavy_tail:
      require(p > 0.0 && std::isfinite(p), "heavy_tail: beta1 must be > 0");
      log_norm_ = -log_sphere_area(d) - log_beta(dd, p);
      moment_order_ = p > 2.0 ? 2.0 : 0.5 * p;
      break;
  }
}

DensityModel DensityModel::gaussian(int d) { return {DensityKind::standard_gaussian, d, 2.0}; }
DensityModel DensityModel::heavy_tail(int d, double beta1) { return {DensityKind::heavy_tail, d, beta1}; }
DensityModel DensityModel::stretched_exp(int d, double beta2) {
  return {DensityKind::stretched_exp, d, beta2};
}

DensityModel DensityModel::make(DensityKind kind, int d, double param) {
  if (kind == DensityKind::standard_gaussian) return gaussian(d);
  return {kind, d, param};
}

DensityModel DensityModel::with_moment_order(double beta) const {
  require(beta > 0.0 && beta <= 2.0, "moment order must lie in (0, 2]");
  require(std::isfinite(moment(beta)), "density has no finite moment of the requested order");
  DensityModel m = *this;
  m.moment_order_ = beta;
  return m;
}

double DensityModel::log_pdf_radius(double r) const {
  switch (kind_) {
    case DensityKind::standard_gaussian: return log_norm_ - 0.5 * r * r;
    case DensityKind::stretched_exp: return log_norm_ - std::pow(r, param_);
    case DensityKind::heavy_tail: return log_norm_ - (d_ + param_) * std::log1p(r);
  }
  return -std::numeric_limits<double>::infinity();
}

double DensityModel::overlap_ratio(const Vector& u, const Vector& xi) const {
  const double lr = log_pdf_radius((u + xi).norm()) - log_pdf_radius(u.norm());
  return lr >= 0.0 ? 1.0 : std::exp(lr);
}

double DensityModel::radial_pdf(double r) const {
  if (r < 0.0) return 0.0;
  if (r == 0.0) return d_ == 1 ? 2.0 * pdf_radius(0.0) : 0.0;
  return std::exp(log_sphere_area(d_) + (d_ - 1) * std::log(r) + log_pdf_radius(r));
}

double DensityModel::radial_cdf(double r) const {
  if (r <= 0.0) return 0.0;
  if (!std::isfinite(r)) return 1.0;
  const double dd = d_;
  switch (kind_) {
    case DensityKind::standard_gaussian: return boost::math::gamma_p(0.5 * dd, 0.5 * r * r);
    case DensityKind::stretched_exp: return boost::math::gamma_p(dd / param_, std::pow(r, param_));
    case DensityKind::heavy_tail: return boost::math::ibeta(dd, param_, r / (1.0 + r));
  }
  return 0.0;
}

double DensityModel::sample_radius(Stream& s) const {
  switch (kind_) {
    case DensityKind::standard_gaussian: {
      double n2 = 0.0;
      for (int i = 0; i < d_; ++i) {
        const double g = s.normal();
        n2 += g * g;
      }
      return std::sqrt(n2);
    }
    case DensityKind::stretched_exp:
      return std::pow(s.gamma(d_ / param_), 1.0 / param_);
    case DensityKind::heavy_tail: {
      // |u| / (1 + |u|) ~ Beta(d, beta1)
      double p = s.uniform();
      if (p <= 0.0) return 0.0;
      const double t = boost::math::ibeta_inv(static_cast<double>(d_), param_, p);
      return t >= 1.0 ? std::numeric_limits<double>::max() : t / (1.0 - t);
    }
  }
  return 0.0;
}

Vector DensityModel::sample(Stream& s) const {
  if (kind_ == DensityKind::standard_gaussian) {
    Vector u(d_);
    for (int i = 0; i < d_; ++i) u(i) = s.normal();
    return u;
  }
  const double r = sample_radius(s);
  return r * s.direction(d_);
}

double DensityModel::moment(double order) const {
  require(order >= 0.0, "moment order must be >= 0");
  if (order == 0.0) return 1.0;
  const double dd = d_;
  switch (kind_) {
    case DensityKind::standard_gaussian:
      return std::exp(0.5 * order * std::log(2.0) + std::lgamma(0.5 * (dd + order)) -
                      std::lgamma(0.5 * dd));
    case DensityKind::stretched_exp:
      return std::exp(std::lgamma((dd + order) / param_) - std::lgamma(dd / param_));
    case DensityKind::heavy_tail:
      if (order >= param_) return std::numeric_limits<double>::infinity();
      return std::exp(log_beta(dd + order, param_ - order) - log_beta(dd, param_));
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace dhpdmp
