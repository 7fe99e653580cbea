#include "dhpdmp/wasserstein.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "dhpdmp/distance.hpp"

namespace dhpdmp {

Assignment solve_assignment(const Eigen::MatrixXd& cost) {
  require(cost.rows() == cost.cols(), "solve_assignment: cost matrix must be square");
  require(cost.allFinite(), "solve_assignment: non-finite cost");
  const int n = static_cast<int>(cost.rows());
  Assignment out;
  if (n == 0) return out;

  // 1-based potentials u (rows), v (columns); p[j] is the row matched to column j.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  out.match.assign(n, -1);
  for (int j = 1; j <= n; ++j) out.match[p[j] - 1] = j - 1;
  for (int i = 0; i < n; ++i) out.cost += cost(i, out.match[i]);
  return out;
}

Assignment brute_force_assignment(const Eigen::MatrixXd& cost) {
  require(cost.rows() == cost.cols(), "brute_force_assignment: cost matrix must be square");
  require(cost.rows() <= 10, "brute_force_assignment: n too large");
  const int n = static_cast<int>(cost.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Assignment best;
  best.cost = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (int i = 0; i < n; ++i) c += cost(i, perm[i]);
    if (c < best.cost) {
      best.cost = c;
      best.match = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (n == 0) best.cost = 0.0;
  return best;
}

double empirical_wasserstein(const std::vector<State>& a, const std::vector<State>& b, const LyapunovFunction& w) {
  require(a.size() == b.size(), "empirical_wasserstein: samples must have equal size");
  require(!a.empty() && a.size() <= 512, "empirical_wasserstein: sample size must lie in [1, 512]");
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = semi_metric_Phi(CoupledState(a[i], b[j]), w);
  return solve_assignment(cost).cost / static_cast<double>(n);
}

}  // namespace dhpdmp
