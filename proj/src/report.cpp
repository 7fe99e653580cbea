#include "dhpdmp/report.hpp"

#include <cmath>
#include <cstdio>

namespace dhpdmp {

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json to_json(const State& s) { return {{"x", to_json(s.x)}, {"v", to_json(s.v)}}; }

Json to_json(const Estimate& e) { return {{"mean", e.mean}, {"se", e.se}}; }

Json to_json(const BetaSolution& b) {
  Json j = {{"feasible", b.feasible},
            {"beta", b.beta},
            {"window", {b.window_lo, b.window_hi}},
            {"K_beta_U", b.k_beta_u}};
  if (!b.reason.empty()) j["reason"] = b.reason;
  return j;
}

Json to_json(const DriftReport& r, bool with_nodes) {
  Json j = {{"method", r.method},
            {"beta_exp", r.beta_exp},
            {"valid", r.valid},
            {"c0", r.c0},
            {"C0", r.C0},
            {"r_star", r.r_star},
            {"min_margin", r.min_margin},
            {"tail_certified", r.tail_certified},
            {"inconclusive", r.inconclusive},
            {"grid", r.grid_description},
            {"grid_nodes", r.grid_nodes},
            {"grid_half_width", r.grid_half_width},
            {"c0_star_threshold", r.c0_star_threshold},
            {"threshold_warning", r.threshold_warning},
            {"notes", r.notes}};
  if (with_nodes) {
    Json nodes = Json::array();
    for (const auto& n : r.jump_nodes)
      nodes.push_back({{"x", to_json(n.x)}, {"integral", to_json(n.integral)}, {"closed_form", n.closed_form}});
    j["jump_nodes"] = nodes;
  }
  return j;
}

Json to_json(const OverlapConstants& o) {
  Json rows = Json::array();
  for (const auto& r : o.rows)
    rows.push_back({{"r", r.radius}, {"xi_norm", r.xi_norm}, {"mc", to_json(r.mc)}, {"quadrature", r.quadrature}});
  return {{"c_star", o.c_star}, {"c_upper_star", o.c_upper_star}, {"c_star_mc", o.c_star_mc}, {"rows", rows}};
}

Json to_json(const B2Report& r) {
  auto rows = [](const std::vector<B2Row>& v) {
    Json a = Json::array();
    for (const auto& row : v)
      a.push_back({{"x", to_json(row.x)}, {"xi_norm", row.xi_norm}, {"ratio", to_json(row.ratio)}});
    return a;
  };
  return {{"pass", r.pass},
          {"c_double_star", r.c_double_star},
          {"c0_double_star", r.c0_double_star},
          {"first", rows(r.first)},
          {"second", rows(r.second)},
          {"moment", rows(r.moment)}};
}

Json to_json(const CouplingParams& p) {
  Json prov = Json::object();
  for (const auto& [k, v] : p.provenance) prov[k] = v;
  return {{"beta", p.beta},
          {"alpha", p.alpha},
          {"alpha0", p.alpha0},
          {"kappa", p.kappa},
          {"a0", p.a0},
          {"epsilon", p.epsilon},
          {"log_epsilon", p.log_epsilon},
          {"R0", p.R0},
          {"r_star", p.r_star},
          {"K0", p.K0},
          {"lambda_star", p.lambda_star},
          {"log_lambda_star", p.log_lambda_star},
          {"c0", p.c0},
          {"C0", p.C0},
          {"c_star", p.c_star},
          {"c_upper_star", p.c_upper_star},
          {"c_double_star", p.c_double_star},
          {"K_beta_U", p.K_beta_U},
          {"theta0", p.theta0},
          {"theta_star", p.theta_star},
          {"m_beta", p.m_beta},
          {"beta_exp", p.beta_exp},
          {"provenance", prov}};
}

Json to_json(const PipelineResult& r) {
  Json j = {{"feasible", r.feasible}, {"ok", r.ok}, {"beta", to_json(r.beta)}};
  if (!r.failure.empty()) j["failure"] = r.failure;
  if (!r.feasible) return j;
  j["drift"] = to_json(r.drift);
  if (r.ok) {
    j["overlap"] = {{"c_star", r.overlap.c_star},
                    {"c_upper_star", r.overlap.c_upper_star},
                    {"c_star_mc", r.overlap.c_star_mc}};
    j["b2"] = {{"pass", r.b2.pass}, {"c_double_star", r.b2.c_double_star}, {"c0_double_star", r.b2.c0_double_star}};
    j["params"] = to_json(r.params);
  }
  return j;
}

Json to_json(const ContractionReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"t", row.t}, {"mean", row.mean}, {"stderr", row.se}, {"envelope", row.envelope}, {"ok", row.ok}});
  return {{"passed", r.passed},
          {"fg_init", r.fg_init},
          {"lambda_star", r.lambda_star},
          {"log_lambda_star", r.log_lambda_star},
          {"fitted_rate", r.fitted_rate},
          {"n_traj", r.n_traj},
          {"seed", r.seed},
          {"worst_t", r.rows.empty() ? 0.0 : r.rows[r.worst_index].t},
          {"worst_excess", r.worst_excess},
          {"rows", rows}};
}

namespace {
Json ks(const KsResult& k) { return {{"statistic", k.statistic}, {"p_value", k.p_value}}; }
}  // namespace

Json to_json(const FlowCheck& c) {
  return {{"passed", c.passed},
          {"sup_gap", c.sup_gap},
          {"segments", c.segments},
          {"hamiltonian_violations", c.hamiltonian_violations}};
}

Json to_json(const ThinningCheck& c) {
  return {{"passed", c.passed}, {"n", c.n}, {"inter_event", ks(c.inter_event)}, {"speeds", ks(c.speeds)}};
}

Json to_json(const MarginalCheck& c) {
  return {{"passed", c.passed},      {"n", c.n},
          {"t", c.t},                {"first_x", ks(c.first_x)},
          {"first_v", ks(c.first_v)}, {"second_x", ks(c.second_x)},
          {"second_v", ks(c.second_v)}};
}

Json to_json(const GeneratorCheck& c) {
  Json rows = Json::array();
  for (const auto& r : c.rows)
    rows.push_back({{"what", r.what},
                    {"x", to_json(r.x)},
                    {"v", to_json(r.v)},
                    {"value", r.value},
                    {"expected", r.expected},
                    {"se", r.se},
                    {"passed", r.passed}});
  return {{"passed", c.passed}, {"rows", rows}};
}

Json to_json(const CouplingCheck& c) {
  Json rows = Json::array();
  for (const auto& r : c.rows)
    rows.push_back(
        {{"pair", r.pair}, {"g", r.g}, {"h", r.h}, {"residual", r.residual}, {"se", r.se}, {"passed", r.passed}});
  return {{"passed", c.passed},
          {"n_functions", c.n_functions},
          {"n_pairs", c.n_pairs},
          {"worst_z", c.worst_z},
          {"rows", rows}};
}

Json to_json(const DriftAgreement& c) {
  return {{"passed", c.passed}, {"nodes", c.nodes}, {"disagreements", c.disagreements}, {"worst_z", c.worst_z}};
}

void write_events_jsonl(std::ostream& out, std::size_t traj_id, const EventLog& log) {
  for (const auto& ev : log.events) {
    Json j = {{"traj_id", traj_id}, {"t", ev.time}, {"pre", to_json(ev.pre)}, {"post", to_json(ev.post)}};
    out << j.dump() << '\n';
  }
}

void write_events_jsonl(std::ostream& out, std::size_t traj_id, const CoupledEventLog& log) {
  for (const auto& ev : log.events) {
    Json j = {{"traj_id", traj_id},
              {"t", ev.time},
              {"branch", to_string(ev.branch)},
              {"pre", {{"first", to_json(ev.pre.first)}, {"second", to_json(ev.pre.second)}}},
              {"post", {{"first", to_json(ev.post.first)}, {"second", to_json(ev.post.second)}}}};
    out << j.dump() << '\n';
  }
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << "\r\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  require(values.size() == columns_, "CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
  out_ << "\r\n";
}

void CsvWriter::row(std::size_t id, const std::vector<double>& values) {
  require(values.size() + 1 == columns_, "CsvWriter: column count mismatch");
  out_ << id;
  for (double v : values) out_ << ',' << format_number(v);
  out_ << "\r\n";
}

}  // namespace dhpdmp
