#ifndef DHPDMP_PARAMS_HPP
#define DHPDMP_PARAMS_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "dhpdmp/coupling.hpp"
#include "dhpdmp/lyapunov.hpp"
#include "dhpdmp/model.hpp"

namespace dhpdmp {

/// The solvability condition on beta fails for the model.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BetaSolution {
  bool feasible = false;
  double beta = 0.0;
  double window_lo = 0.0;  // 8 theta / 5
  double window_hi = 0.0;  // min(2 theta, gamma^2 / 4)
  double k_beta_u = 0.0;
  std::string reason;
};

/// Largest beta with beta <= gamma^2/4 and beta >= 4 K_{beta,U} for U = theta |x|^2;
/// feasible iff gamma >= 2 sqrt(2 theta).
BetaSolution solve_beta(double gamma, const PotentialModel& potential);

/// Smaller root of alpha^2 - gamma alpha + beta = 0.
double compute_alpha(double beta, double gamma);

/// First stage of the parameter recipe: everything that does not need the
/// overlap constants. kappa and alpha fix where c* has to be estimated.
struct Geometry {
  double beta = 0.0;
  double k_beta_u = 0.0;
  double alpha = 0.0;
  double alpha0 = 0.0;
  double r_star = 0.0;
  double R0 = 0.0;
  double kappa = 0.0;
};

Geometry compute_geometry(const ModelSpec& model, const DriftReport& drift);

/// Where each constant came from: "closed-form", "MC", "MC+quadrature", ...
using Provenance = std::map<std::string, std::string>;

struct CouplingParams {
  double beta = 0.0;
  double alpha = 0.0;
  double alpha0 = 0.0;
  double kappa = 0.0;
  double a0 = 0.0;
  double epsilon = 0.0;
  double log_epsilon = 0.0;
  double R0 = 0.0;
  double r_star = 0.0;
  double K0 = 0.0;
  double lambda_star = 0.0;
  double log_lambda_star = 0.0;
  double c0 = 0.0;
  double C0 = 0.0;
  double c_star = 0.0;
  double c_upper_star = 0.0;
  double c_double_star = 0.0;
  double K_beta_U = 0.0;
  double theta0 = 0.0;
  double theta_star = 0.0;
  double m_beta = 0.0;
  double beta_exp = 2.0;
  Provenance provenance;

  CouplingKnobs knobs() const { return {alpha, kappa}; }
  /// lambda* <= c0 eps / (2 (1 + 2 eps)), compared in log space.
  double log_first_rate_term() const;
};

/// The parameter recipe. epsilon and lambda* are formed in log space: for
/// realistic models exp(-a0 R0) is far below the smallest double, so the
/// linear values may underflow to 0 while their logarithms stay exact.
CouplingParams build_params(const ModelSpec& model, const DriftReport& drift, double c_star,
                            double c_upper_star, double c_double_star);

struct PipelineOptions {
  DriftOptions drift;
  std::size_t n_overlap = 100000;
  std::size_t overlap_grid = 24;
  B2Options b2;
  std::size_t b2_xi_points = 12;
  std::uint64_t seed = 7;
  double beta_exp = 2.0;
  /// Use the closed-form drift certificate when beta_exp = 2 and m2 < inf.
  bool prefer_closed_form = true;
};

struct PipelineResult {
  BetaSolution beta;
  DriftReport drift;
  Geometry geometry;
  OverlapConstants overlap;
  B2Report b2;
  CouplingParams params;
  bool feasible = false;  // beta solvable
  bool ok = false;        // feasible and every certificate passed
  std::string failure;
};

/// solve_beta -> drift certificate -> geometry -> overlap constants at
/// (alpha, kappa) -> moment inequalities on shifts up to alpha kappa -> build_params.
/// Infeasibility of beta is reported, not thrown.
PipelineResult run_pipeline(const ModelSpec& model, const PipelineOptions& opts = {});

/// Largest r = alpha0 |z| + |q| seen over n random pairs drawn inside the
/// region {c0 (W + W') <= 4 C0}; the containment check is max <= R0.
struct RegionCheck {
  std::size_t n = 0;
  double max_r = 0.0;
  bool contained = false;
};
RegionCheck check_region_containment(const ModelSpec& model, const CouplingParams& params,
                                     std::size_t n, Stream& stream);

}  // namespace dhpdmp

#endif  // DHPDMP_PARAMS_HPP
