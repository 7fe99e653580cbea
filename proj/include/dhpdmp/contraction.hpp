#ifndef DHPDMP_CONTRACTION_HPP
#define DHPDMP_CONTRACTION_HPP

#include <cstdint>
#include <vector>

#include "dhpdmp/coupling.hpp"
#include "dhpdmp/params.hpp"

namespace dhpdmp {

struct ContractionRow {
  double t = 0.0;
  double mean = 0.0;
  double se = 0.0;
  double envelope = 0.0;  // FG(init) exp(-lambda* t)
  bool ok = true;         // mean <= envelope + 3 se
};

struct ContractionReport {
  double fg_init = 0.0;
  double lambda_star = 0.0;
  double log_lambda_star = 0.0;
  std::size_t n_traj = 0;
  std::uint64_t seed = 0;
  std::vector<ContractionRow> rows;
  bool passed = true;
  std::size_t worst_index = 0;  // grid point with the largest mean - envelope - 3 se
  double worst_excess = 0.0;
  /// -slope of log(mean) against t over points with mean > 0; +inf when the
  /// mean vanishes identically.
  double fitted_rate = 0.0;
  /// FG per trajectory and grid time, row-major [traj][t]; kept for exports.
  std::vector<std::vector<double>> samples;
};

/// Runs n_traj coupled trajectories from `init` (trajectory i uses
/// stream.split(i)) and checks mean FG(t) <= FG(init) e^{-lambda* t} + 3 se(t).
ContractionReport contraction_experiment(const CoupledState& init, const ModelSpec& model,
                                         const CouplingParams& params, const std::vector<double>& t_grid,
                                         std::size_t n_traj, const Stream& stream, bool keep_samples = false);

}  // namespace dhpdmp

#endif  // DHPDMP_CONTRACTION_HPP
