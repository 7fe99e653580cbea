#include "dhpdmp/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dhpdmp/rate_expr.hpp"

namespace dhpdmp {

namespace {

using json = nlohmann::json;

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

double get_number(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(where + "." + key + ": must be finite");
  return d;
}

std::uint64_t get_unsigned(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError(where + "." + key + ": expected a non-negative integer");
}

std::string get_string(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> get_vector(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(where + "." + key + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(where + "." + key + ": expected an array of numbers");
    out.push_back(e.get<double>());
    if (!std::isfinite(out.back())) throw ConfigError(where + "." + key + ": entries must be finite");
  }
  return out;
}

InitConfig parse_init(const json& j, const std::string& where) {
  check_keys(j, where, {"x", "v"});
  if (!j.contains("x") || !j.contains("v")) throw ConfigError(where + ": needs both 'x' and 'v'");
  return {get_vector(j, "x", where), get_vector(j, "v", where)};
}

json init_json(const InitConfig& c) { return {{"x", c.x}, {"v", c.v}}; }

void validate(const RunConfig& c) {
  const ModelConfig& m = c.model;
  if (m.d < 1) throw ConfigError("model.d: must be >= 1");
  if (!(m.gamma > 0.0)) throw ConfigError("model.gamma: must be > 0");
  if (m.potential.kind != "quadratic") throw ConfigError("model.potential.kind: only 'quadratic' is supported");
  if (!(m.potential.theta >= 0.0)) throw ConfigError("model.potential.theta: must be >= 0");
  const RateConfig& r = m.rate;
  if (r.kind != "constant" && r.kind != "sinusoidal_bounded" && r.kind != "expression")
    throw ConfigError("model.rate.kind: expected constant, sinusoidal_bounded or expression");
  if (!(r.lambda1 > 0.0) || !(r.lambda1 <= r.lambda2))
    throw ConfigError("model.rate: need 0 < lambda1 <= lambda2");
  if (r.kind == "constant" && r.lambda1 != r.lambda2)
    throw ConfigError("model.rate: a constant rate needs lambda1 = lambda2");
  if (r.kind == "expression" && (r.expr.empty() || !r.lambdaJ))
    throw ConfigError("model.rate: an expression rate needs 'expr' and 'lambdaJ'");
  if (r.kind != "expression" && !r.expr.empty()) throw ConfigError("model.rate.expr: only for kind 'expression'");
  if (r.lambdaJ && !(*r.lambdaJ >= 0.0)) throw ConfigError("model.rate.lambdaJ: must be >= 0");
  const DensityConfig& dc = m.density;
  if (dc.kind == "standard_gaussian") {
    if (dc.param) throw ConfigError("model.density.param: not used by standard_gaussian");
  } else if (dc.kind == "heavy_tail" || dc.kind == "stretched_exp") {
    if (!dc.param || !(*dc.param > 0.0)) throw ConfigError("model.density.param: must be > 0");
  } else {
    throw ConfigError("model.density.kind: expected standard_gaussian, heavy_tail or stretched_exp");
  }

  const ExperimentConfig& e = c.experiment;
  if (!(e.t_end > 0.0)) throw ConfigError("experiment.t_end: must be > 0");
  if (e.n_traj == 0) throw ConfigError("experiment.n_traj: must be >= 1");
  if (e.n_mc == 0) throw ConfigError("experiment.n_mc: must be >= 1");
  if (e.grid_points < 3) throw ConfigError("experiment.grid_points: must be >= 3");
  if (!(e.beta_exp > 0.0 && e.beta_exp <= 2.0)) throw ConfigError("experiment.beta_exp: must lie in (0, 2]");
  for (std::size_t i = 0; i < e.t_grid.size(); ++i) {
    if (e.t_grid[i] < 0.0 || e.t_grid[i] > e.t_end)
      throw ConfigError("experiment.t_grid: times must lie in [0, t_end]");
    if (i > 0 && e.t_grid[i] < e.t_grid[i - 1]) throw ConfigError("experiment.t_grid: must be sorted");
  }
  for (const auto* init : {&e.init, &e.init2}) {
    if (*init && ((*init)->x.size() != static_cast<std::size_t>(m.d) || (*init)->v.size() != static_cast<std::size_t>(m.d)))
      throw ConfigError("experiment.init: x and v must have d entries");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  check_keys(root, "config", {"model", "experiment", "seed"});
  if (root.contains("seed")) c.seed = get_unsigned(root, "seed", "config");

  if (root.contains("model")) {
    const json& m = root["model"];
    check_keys(m, "model", {"d", "gamma", "potential", "rate", "density"});
    if (m.contains("d")) {
      const double d = get_number(m, "d", "model");
      if (d != std::floor(d) || d < 1 || d > 64) throw ConfigError("model.d: must be an integer in [1, 64]");
      c.model.d = static_cast<int>(d);
    }
    if (m.contains("gamma")) c.model.gamma = get_number(m, "gamma", "model");
    if (m.contains("potential")) {
      const json& p = m["potential"];
      check_keys(p, "model.potential", {"kind", "theta"});
      if (p.contains("kind")) c.model.potential.kind = get_string(p, "kind", "model.potential");
      if (p.contains("theta")) c.model.potential.theta = get_number(p, "theta", "model.potential");
    }
    if (m.contains("rate")) {
      const json& r = m["rate"];
      check_keys(r, "model.rate", {"kind", "lambda1", "lambda2", "lambdaJ", "expr"});
      if (r.contains("kind")) c.model.rate.kind = get_string(r, "kind", "model.rate");
      if (r.contains("lambda1")) c.model.rate.lambda1 = get_number(r, "lambda1", "model.rate");
      if (r.contains("lambda2")) c.model.rate.lambda2 = get_number(r, "lambda2", "model.rate");
      if (r.contains("lambdaJ")) c.model.rate.lambdaJ = get_number(r, "lambdaJ", "model.rate");
      if (r.contains("expr")) c.model.rate.expr = get_string(r, "expr", "model.rate");
    }
    if (m.contains("density")) {
      const json& dn = m["density"];
      check_keys(dn, "model.density", {"kind", "param"});
      if (dn.contains("kind")) c.model.density.kind = get_string(dn, "kind", "model.density");
      if (dn.contains("param")) c.model.density.param = get_number(dn, "param", "model.density");
    }
  }

  if (root.contains("experiment")) {
    const json& e = root["experiment"];
    const std::string w = "experiment";
    check_keys(e, w, {"t_end", "n_traj", "t_grid", "n_mc", "grid_points", "beta_exp", "init", "init2"});
    if (e.contains("t_end")) c.experiment.t_end = get_number(e, "t_end", w);
    if (e.contains("n_traj")) c.experiment.n_traj = get_unsigned(e, "n_traj", w);
    if (e.contains("t_grid")) c.experiment.t_grid = get_vector(e, "t_grid", w);
    if (e.contains("n_mc")) c.experiment.n_mc = get_unsigned(e, "n_mc", w);
    if (e.contains("grid_points")) c.experiment.grid_points = static_cast<int>(get_unsigned(e, "grid_points", w));
    if (e.contains("beta_exp")) c.experiment.beta_exp = get_number(e, "beta_exp", w);
    if (e.contains("init")) c.experiment.init = parse_init(e["init"], "experiment.init");
    if (e.contains("init2")) c.experiment.init2 = parse_init(e["init2"], "experiment.init2");
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  json rate = {{"kind", c.model.rate.kind}, {"lambda1", c.model.rate.lambda1}, {"lambda2", c.model.rate.lambda2}};
  if (c.model.rate.lambdaJ) rate["lambdaJ"] = *c.model.rate.lambdaJ;
  if (!c.model.rate.expr.empty()) rate["expr"] = c.model.rate.expr;
  json density = {{"kind", c.model.density.kind}};
  if (c.model.density.param) density["param"] = *c.model.density.param;
  json model = {{"d", c.model.d},
                {"gamma", c.model.gamma},
                {"potential", {{"kind", c.model.potential.kind}, {"theta", c.model.potential.theta}}},
                {"rate", rate},
                {"density", density}};
  json exp = {{"t_end", c.experiment.t_end},
              {"n_traj", c.experiment.n_traj},
              {"n_mc", c.experiment.n_mc},
              {"grid_points", c.experiment.grid_points},
              {"beta_exp", c.experiment.beta_exp}};
  if (!c.experiment.t_grid.empty()) exp["t_grid"] = c.experiment.t_grid;
  if (c.experiment.init) exp["init"] = init_json(*c.experiment.init);
  if (c.experiment.init2) exp["init2"] = init_json(*c.experiment.init2);
  json root = {{"model", model}, {"experiment", exp}, {"seed", c.seed}};
  return root.dump(2) + "\n";
}

ModelSpec build_model(const ModelConfig& c) {
  ModelSpec m;
  m.d = c.d;
  m.gamma = c.gamma;
  m.potential = PotentialModel::quadratic(c.potential.theta);
  if (c.rate.kind == "constant") {
    m.rate = JumpRateModel::constant(c.rate.lambda2);
  } else if (c.rate.kind == "sinusoidal_bounded") {
    m.rate = JumpRateModel::sinusoidal(c.rate.lambda1, c.rate.lambda2);
    if (c.rate.lambdaJ && *c.rate.lambdaJ < m.rate.lambda_j())
      throw ConfigError("model.rate.lambdaJ: below the Lipschitz constant (lambda2 - lambda1)/2");
  } else {
    try {
      m.rate = rate_from_expression(c.rate.expr, c.rate.lambda1, c.rate.lambda2, *c.rate.lambdaJ, c.d);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  const double param = c.density.param.value_or(2.0);
  m.density = DensityModel::make(density_kind_from_string(c.density.kind), c.d, param);
  try {
    m.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return m;
}

std::vector<double> effective_t_grid(const ExperimentConfig& e) {
  if (!e.t_grid.empty()) return e.t_grid;
  std::vector<double> g;
  const int n = static_cast<int>(std::floor(e.t_end / 0.5 + 1e-9));
  for (int i = 0; i <= n; ++i) g.push_back(0.5 * i);
  if (g.back() < e.t_end) g.push_back(e.t_end);
  return g;
}

State initial_state(const ExperimentConfig& e, int d, bool second) {
  const auto& init = second ? e.init2 : e.init;
  if (init) return State(Eigen::Map<const Vector>(init->x.data(), d), Eigen::Map<const Vector>(init->v.data(), d));
  State s = State::zero(d);
  if (!second) s.x[0] = 1.0;
  return s;
}

}  // namespace dhpdmp
