#include "dhpdmp/rate_expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace dhpdmp {

struct RateExpression::Node {
  enum class Op { num, x, v, add, sub, mul, div, neg, sin, cos } op = Op::num;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;
};

namespace {

using Node = RateExpression::Node;
using NodePtr = std::shared_ptr<const Node>;
using Op = Node::Op;

constexpr double kInf = std::numeric_limits<double>::infinity();

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double value = 0.0) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  n->value = value;
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "rate expression: " << what << " at position " << pos_ << " in '" << s_ << "'";
    throw InvalidArgument(os.str());
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+')) lhs = make(Op::add, lhs, term());
      else if (eat('-')) lhs = make(Op::sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*')) lhs = make(Op::mul, lhs, unary());
      else if (eat('/')) lhs = make(Op::div, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make(Op::neg, unary());
    return primary();
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (eat('(')) {
      NodePtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double val = 0.0;
      try {
        val = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      return make(Op::num, nullptr, nullptr, val);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "xn") return make(Op::x);
      if (id == "vn") return make(Op::v);
      if (id == "sin" || id == "cos") {
        if (!eat('(')) fail("expected '(' after " + id);
        NodePtr arg = expr();
        if (!eat(')')) fail("expected ')'");
        return make(id == "sin" ? Op::sin : Op::cos, arg);
      }
      pos_ = start;
      fail("unknown identifier '" + id + "'");
    }
    fail("unexpected character");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double eval(const Node& n, double x, double v) {
  switch (n.op) {
    case Op::num: return n.value;
    case Op::x: return x;
    case Op::v: return v;
    case Op::add: return eval(*n.a, x, v) + eval(*n.b, x, v);
    case Op::sub: return eval(*n.a, x, v) - eval(*n.b, x, v);
    case Op::mul: return eval(*n.a, x, v) * eval(*n.b, x, v);
    case Op::div: return eval(*n.a, x, v) / eval(*n.b, x, v);
    case Op::neg: return -eval(*n.a, x, v);
    case Op::sin: return std::sin(eval(*n.a, x, v));
    case Op::cos: return std::cos(eval(*n.a, x, v));
  }
  return 0.0;
}

// Outward widening by one ulp keeps the enclosure valid under rounding.
Interval widen(double lo, double hi) {
  if (std::isnan(lo)) lo = -kInf;
  if (std::isnan(hi)) hi = kInf;
  return {std::nextafter(lo, -kInf), std::nextafter(hi, kInf)};
}

double mul_end(double a, double b) {
  const double r = a * b;
  return std::isnan(r) ? 0.0 : r;  // 0 * inf contributes 0 to the hull
}

Interval imul(Interval a, Interval b) {
  const double p[] = {mul_end(a.lo, b.lo), mul_end(a.lo, b.hi), mul_end(a.hi, b.lo), mul_end(a.hi, b.hi)};
  return widen(*std::min_element(p, p + 4), *std::max_element(p, p + 4));
}

Interval idiv(Interval a, Interval b) {
  if (b.lo <= 0.0 && b.hi >= 0.0) return {-kInf, kInf};
  return imul(a, widen(1.0 / b.hi, 1.0 / b.lo));
}

// sin over [lo, hi]: extrema are attained at endpoints or at pi/2 + k pi.
Interval isin(Interval a) {
  if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || a.hi - a.lo >= 2.0 * std::numbers::pi) return {-1.0, 1.0};
  double lo = std::min(std::sin(a.lo), std::sin(a.hi));
  double hi = std::max(std::sin(a.lo), std::sin(a.hi));
  const double pi = std::numbers::pi;
  // peaks at pi/2 + 2k pi, troughs at -pi/2 + 2k pi
  if (std::floor((a.hi - pi / 2.0) / (2.0 * pi)) >= std::ceil((a.lo - pi / 2.0) / (2.0 * pi))) hi = 1.0;
  if (std::floor((a.hi + pi / 2.0) / (2.0 * pi)) >= std::ceil((a.lo + pi / 2.0) / (2.0 * pi))) lo = -1.0;
  const Interval w = widen(lo, hi);
  return {std::max(w.lo, -1.0), std::min(w.hi, 1.0)};
}

Interval enclose_node(const Node& n, Interval x, Interval v) {
  switch (n.op) {
    case Op::num: return {n.value, n.value};
    case Op::x: return x;
    case Op::v: return v;
    case Op::add: {
      const Interval a = enclose_node(*n.a, x, v), b = enclose_node(*n.b, x, v);
      return widen(a.lo + b.lo, a.hi + b.hi);
    }
    case Op::sub: {
      const Interval a = enclose_node(*n.a, x, v), b = enclose_node(*n.b, x, v);
      return widen(a.lo - b.hi, a.hi - b.lo);
    }
    case Op::mul: return imul(enclose_node(*n.a, x, v), enclose_node(*n.b, x, v));
    case Op::div: return idiv(enclose_node(*n.a, x, v), enclose_node(*n.b, x, v));
    case Op::neg: {
      const Interval a = enclose_node(*n.a, x, v);
      return {-a.hi, -a.lo};
    }
    case Op::sin: return isin(enclose_node(*n.a, x, v));
    case Op::cos: {
      const Interval a = enclose_node(*n.a, x, v);
      const double s = std::numbers::pi / 2.0;
      return isin(widen(a.lo + s, a.hi + s));
    }
  }
  return {-kInf, kInf};
}

}  // namespace

RateExpression RateExpression::parse(const std::string& text) {
  RateExpression e;
  e.text_ = text;
  e.root_ = Parser(text).parse();
  return e;
}

double RateExpression::operator()(double xn, double vn) const { return eval(*root_, xn, vn); }

Interval RateExpression::enclose(Interval x, Interval v) const { return enclose_node(*root_, x, v); }

std::string check_rate_bounds(const RateExpression& e, double lo, double hi) {
  constexpr int kCells = 100;
  constexpr double kSpan = 50.0;
  const double tol = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  auto cell = [&](int i) -> Interval {
    if (i == kCells) return {kSpan, kInf};
    return {kSpan * i / kCells, kSpan * (i + 1) / kCells};
  };
  for (int i = 0; i <= kCells; ++i) {
    for (int j = 0; j <= kCells; ++j) {
      const Interval r = e.enclose(cell(i), cell(j));
      if (r.lo < lo - tol || r.hi > hi + tol) {
        std::ostringstream os;
        os << "cannot certify " << lo << " <= J <= " << hi << ": on |x| in [" << cell(i).lo << ", "
           << cell(i).hi << "], |v| in [" << cell(j).lo << ", " << cell(j).hi << "] J encloses [" << r.lo
           << ", " << r.hi << "]";
        return os.str();
      }
    }
  }
  return {};
}

JumpRateModel rate_from_expression(const std::string& text, double lambda1, double lambda2, double lambda_j,
                                   int d) {
  const RateExpression e = RateExpression::parse(text);
  const std::string bad = check_rate_bounds(e, lambda1, lambda2);
  if (!bad.empty()) throw InvalidArgument("rate expression: " + bad);
  auto fn = [e, lambda1, lambda2](const Vector& x, const Vector& v) {
    return std::clamp(e(x.norm(), v.norm()), lambda1, lambda2);
  };
  return JumpRateModel::custom(fn, lambda1, lambda2, lambda_j, d, "expr: " + text);
}

}  // namespace dhpdmp
