#ifndef DHPDMP_STATS_HPP
#define DHPDMP_STATS_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "dhpdmp/types.hpp"

namespace dhpdmp {

/// Welford running mean / variance.
class Accumulator {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stderr_() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }
  Estimate estimate() const { return {mean_, stderr_()}; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool passes(double level) const { return p_value > level; }
};

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

/// One-sample KS test of `samples` against a continuous CDF.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Two-sample KS test.
KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b);

/// Least-squares slope of y against t.
double least_squares_slope(std::span<const double> t, std::span<const double> y);

}  // namespace dhpdmp

#endif  // DHPDMP_STATS_HPP
