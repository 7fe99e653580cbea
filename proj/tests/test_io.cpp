#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dhpdmp/config.hpp"
#include "dhpdmp/distance.hpp"
#include "dhpdmp/rate_expr.hpp"
#include "dhpdmp/report.hpp"
#include "dhpdmp/wasserstein.hpp"

using namespace dhpdmp;

namespace {

const char* kReference = R"({
  "model": {"d": 2, "gamma": 4,
            "potential": {"kind": "quadratic", "theta": 1},
            "rate": {"kind": "constant", "lambda1": 2, "lambda2": 2},
            "density": {"kind": "standard_gaussian"}},
  "experiment": {"t_end": 10, "n_traj": 100, "n_mc": 1000},
  "seed": 42
})";

}  // namespace

TEST_CASE("config parses and round-trips") {
  const RunConfig c = parse_config(kReference);
  CHECK(c.model.d == 2);
  CHECK(c.model.gamma == 4.0);
  CHECK(c.seed == 42);
  CHECK(c.experiment.n_traj == 100);
  CHECK(parse_config(serialize_config(c)) == c);

  RunConfig e = c;
  e.model.rate = {"expression", 1.0, 3.0, 0.5, "2 + sin(xn + vn)"};
  e.model.density = {"heavy_tail", 1.5};
  e.experiment.t_grid = {0.0, 1.0, 2.5};
  e.experiment.init = InitConfig{{1.0, 2.0}, {0.0, -1.0}};
  e.experiment.beta_exp = 0.5;
  e.seed = 18446744073709551615ull;
  CHECK(parse_config(serialize_config(e)) == e);
}

TEST_CASE("config rejects unknown keys and bad values") {
  CHECK_THROWS_AS(parse_config(R"({"model": {"gama": 4}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"sede": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"model": {"gamma": -1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"model": {"rate": {"kind": "constant", "lambda1": 3, "lambda2": 2}}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"model": {"density": {"kind": "heavy_tail"}}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": {"n_traj": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": {"t_end": 5, "t_grid": [0, 6]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": {"beta_exp": 3}})"), ConfigError);
  try {
    parse_config(R"({"model": {"potential": {"kind": "quadratic", "thet": 1}}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("thet") != std::string::npos);
  }
}

TEST_CASE("default time grid and initial states") {
  const RunConfig c = parse_config(kReference);
  const auto g = effective_t_grid(c.experiment);
  REQUIRE(g.size() == 21);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 10.0);
  CHECK(g[1] == 0.5);
  const State a = initial_state(c.experiment, 2, false);
  const State b = initial_state(c.experiment, 2, true);
  CHECK(a.x[0] == 1.0);
  CHECK(a.v.norm() == 0.0);
  CHECK(b.x.norm() == 0.0);
}

TEST_CASE("rate expressions evaluate and enclose") {
  const RateExpression e = RateExpression::parse("2 + sin(xn + vn) * 0.5 - -1 / 4");
  CHECK(e(1.0, 2.0) == doctest::Approx(2.0 + 0.5 * std::sin(3.0) + 0.25));
  const Interval box = e.enclose({0.0, 0.1}, {0.0, 0.1});
  CHECK(box.lo <= e(0.05, 0.05));
  CHECK(box.hi >= e(0.05, 0.05));
  CHECK(check_rate_bounds(e, 1.75, 2.75).empty());
  CHECK_FALSE(check_rate_bounds(e, 2.0, 2.75).empty());
  CHECK_FALSE(check_rate_bounds(RateExpression::parse("1 + xn"), 1.0, 5.0).empty());
  CHECK(check_rate_bounds(RateExpression::parse("(3 + cos(vn)) / 2"), 1.0, 2.0).empty());
}

TEST_CASE("rate expression syntax errors") {
  for (const char* bad : {"", "2 +", "sin 3", "xn vn", "(1 + 2", "foo", "1 ^ 2", "cos()", "3 )"})
    CHECK_THROWS_AS(RateExpression::parse(bad), InvalidArgument);
}

TEST_CASE("rate from expression builds a bounded model") {
  const JumpRateModel r = rate_from_expression("2 + 0.5 * sin(xn)", 1.5, 2.5, 0.5, 2);
  Vector x(2), v(2);
  x << 1.0, 0.0;
  v << 0.0, 0.0;
  CHECK(r(x, v) == doctest::Approx(2.0 + 0.5 * std::sin(1.0)));
  CHECK(r.lambda1() == 1.5);
  CHECK(r.lambda2() == 2.5);
  CHECK_THROWS_AS(rate_from_expression("2 + sin(xn)", 1.5, 2.5, 1.0, 2), InvalidArgument);
  const RunConfig c = parse_config(
      R"j({"model": {"rate": {"kind": "expression", "lambda1": 1, "lambda2": 3, "lambdaJ": 1, "expr": "2 + sin(vn)"}}})j");
  CHECK(build_model(c.model).rate(x, v) == doctest::Approx(2.0));
}

TEST_CASE("assignment beats greedy on a crafted instance") {
  Eigen::MatrixXd c(3, 3);
  c << 1, 2, 9,
       2, 9, 9,
       9, 9, 1;
  const Assignment h = solve_assignment(c);
  CHECK(h.cost == 5.0);
  CHECK(h.match == std::vector<int>{1, 0, 2});
  std::vector<int> p{0, 1, 2};
  double best = 1e300;
  do {
    best = std::min(best, c(0, p[0]) + c(1, p[1]) + c(2, p[2]));
  } while (std::next_permutation(p.begin(), p.end()));
  CHECK(h.cost == best);
  CHECK(brute_force_assignment(c).cost == best);
}

TEST_CASE("assignment matches brute force on random instances") {
  Stream s(77);
  for (int n = 1; n <= 7; ++n) {
    for (int k = 0; k < 20; ++k) {
      Eigen::MatrixXd c(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c(i, j) = std::floor(10.0 * s.uniform());  // ties on purpose
      CHECK(solve_assignment(c).cost == brute_force_assignment(c).cost);
    }
  }
}

TEST_CASE("empirical Wasserstein under Phi") {
  ModelSpec m;
  m.d = 2;
  m.gamma = 4.0;
  m.density = DensityModel::gaussian(2);
  m.rate = JumpRateModel::constant(2.0);
  const LyapunovFunction w = LyapunovFunction::for_model(m);
  Stream s(3);
  std::vector<State> a, b;
  for (int i = 0; i < 6; ++i) {
    Vector x(2), v(2);
    x << s.normal(), s.normal();
    v << s.normal(), s.normal();
    a.emplace_back(x, v);
    b.emplace_back(x * 0.7, v + Vector::Constant(2, 0.2));
  }
  CHECK(empirical_wasserstein(a, a, w) == 0.0);
  std::vector<int> p(6);
  std::iota(p.begin(), p.end(), 0);
  double best = 1e300;
  do {
    double sum = 0.0;
    for (int i = 0; i < 6; ++i) sum += semi_metric_Phi(CoupledState(a[i], b[p[i]]), w);
    best = std::min(best, sum / 6.0);
  } while (std::next_permutation(p.begin(), p.end()));
  CHECK(empirical_wasserstein(a, b, w) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("CSV numbers and line endings") {
  std::ostringstream os;
  CsvWriter w(os, {"t", "mean"});
  w.row({0.5, 1.0 / 3.0});
  CHECK(os.str() == "t,mean\r\n0.5,0.33333333333333331\r\n");
  CHECK_THROWS_AS(w.row({1.0}), InvalidArgument);
}
