#ifndef DHPDMP_RATE_EXPR_HPP
#define DHPDMP_RATE_EXPR_HPP

#include <memory>
#include <string>
#include <vector>

#include "dhpdmp/model.hpp"

namespace dhpdmp {

/// Closed interval; bounds may be infinite.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Jump rate written as an arithmetic expression of xn = |x| and vn = |v|.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | primary
///   primary := number | 'xn' | 'vn' | ('sin' | 'cos') '(' expr ')' | '(' expr ')'
class RateExpression {
 public:
  /// Throws InvalidArgument with the offending position.
  static RateExpression parse(const std::string& text);

  double operator()(double xn, double vn) const;
  /// Interval enclosure of the expression over xn in x, vn in v.
  Interval enclose(Interval x, Interval v) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

/// Certifies lo <= expr <= hi for all xn, vn >= 0 by interval evaluation
/// over a subdivision of [0, inf)^2; returns an empty string on success.
std::string check_rate_bounds(const RateExpression& e, double lo, double hi);

/// Jump-rate model from an expression after the bound certificate and the
/// Lipschitz spot check.
JumpRateModel rate_from_expression(const std::string& text, double lambda1, double lambda2, double lambda_j,
                                   int d);

}  // namespace dhpdmp

#endif  // DHPDMP_RATE_EXPR_HPP
