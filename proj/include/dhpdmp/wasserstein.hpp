#ifndef DHPDMP_WASSERSTEIN_HPP
#define DHPDMP_WASSERSTEIN_HPP

#include <vector>

#include "dhpdmp/lyapunov.hpp"
#include "dhpdmp/types.hpp"

namespace dhpdmp {

struct Assignment {
  std::vector<int> match;  // row i goes to column match[i]
  double cost = 0.0;       // total cost
};

/// Minimum-cost perfect matching on a square cost matrix (Hungarian
/// algorithm with potentials, O(n^3)).
Assignment solve_assignment(const Eigen::MatrixXd& cost);

/// Exhaustive minimum over all permutations; for small n only.
Assignment brute_force_assignment(const Eigen::MatrixXd& cost);

/// Mean of Phi over the optimal matching between two equal-size samples.
double empirical_wasserstein(const std::vector<State>& a, const std::vector<State>& b, const LyapunovFunction& w);

}  // namespace dhpdmp

#endif  // DHPDMP_WASSERSTEIN_HPP
