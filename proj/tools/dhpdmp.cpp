// Command line front end: params, simulate, couple, verify, contract.
//
// Exit codes: 0 success, 1 usage or config error, 2 infeasible parameters,
// 3 verification failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dhpdmp/config.hpp"
#include "dhpdmp/contraction.hpp"
#include "dhpdmp/distance.hpp"
#include "dhpdmp/parallel.hpp"
#include "dhpdmp/params.hpp"
#include "dhpdmp/pdmp.hpp"
#include "dhpdmp/report.hpp"
#include "dhpdmp/verify.hpp"

namespace fs = std::filesystem;
using namespace dhpdmp;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kInfeasible = 2;
constexpr int kFailed = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::size_t threads = 1;
  std::string format;  // empty: both
  std::string which;
};

struct Context {
  RunConfig cfg;
  ModelSpec model;
  Options opts;

  bool want_csv() const { return opts.format.empty() || opts.format == "csv"; }
  bool want_jsonl() const { return opts.format.empty() || opts.format == "jsonl"; }

  /// Opens out/name for writing, or nullopt when no --out was given.
  std::optional<std::ofstream> open(const std::string& name) const {
    if (opts.out.empty()) return std::nullopt;
    fs::create_directories(opts.out);
    std::ofstream f(fs::path(opts.out) / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (fs::path(opts.out) / name).string());
    return f;
  }

  void write_json(const std::string& name, const Json& j) const {
    if (auto f = open(name)) *f << j.dump(2) << '\n';
  }
};

PipelineOptions pipeline_options(const RunConfig& cfg) {
  PipelineOptions p;
  p.drift.points_per_axis = cfg.experiment.grid_points;
  p.drift.n_mc = cfg.experiment.n_mc;
  p.drift.seed = cfg.seed;
  p.n_overlap = cfg.experiment.n_mc;
  p.b2.n_mc = cfg.experiment.n_mc;
  p.b2.seed = cfg.seed + 1;
  p.seed = cfg.seed;
  p.beta_exp = cfg.experiment.beta_exp;
  return p;
}

DriftReport drift_for(const Context& c) {
  const PipelineOptions p = pipeline_options(c.cfg);
  const bool closed = p.beta_exp == 2.0 && std::isfinite(c.model.density.moment(2.0));
  return closed ? lyapunov_drift_quadratic(c.model, p.drift) : lyapunov_drift_mc(c.model, p.beta_exp, p.drift);
}

/// Exit code for a pipeline result that did not finish.
int pipeline_failure(const PipelineResult& r) {
  std::cerr << "dhpdmp: " << r.failure << '\n';
  return r.feasible ? kFailed : kInfeasible;
}

CoupledState init_pair(const Context& c) {
  return {initial_state(c.cfg.experiment, c.model.d, false), initial_state(c.cfg.experiment, c.model.d, true)};
}

int emit(const Context& c, const std::string& file, Json j, bool passed) {
  c.write_json(file, j);
  std::cout << j.dump(2) << '\n';
  return passed ? kOk : kFailed;
}

int cmd_params(const Context& c) {
  const PipelineResult r = run_pipeline(c.model, pipeline_options(c.cfg));
  Json j = to_json(r);
  c.write_json("params.json", j);
  std::cout << j.dump(2) << '\n';
  if (!r.ok) return pipeline_failure(r);
  return kOk;
}

int cmd_simulate(const Context& c) {
  const auto& e = c.cfg.experiment;
  const State init = initial_state(e, c.model.d, false);
  const auto grid = effective_t_grid(e);
  const FlowIntegrator flow = FlowIntegrator::for_model(c.model);
  const Stream root(c.cfg.seed);
  std::vector<EventLog> logs(e.n_traj);
  parallel_for(e.n_traj, [&](std::size_t i) {
    Stream s = root.split(i);
    logs[i] = simulate(init, e.t_end, c.model, flow, s);
  });

  std::size_t events = 0;
  for (const auto& l : logs) events += l.events.size();
  if (c.want_jsonl()) {
    if (auto f = c.open("events.jsonl"))
      for (std::size_t i = 0; i < logs.size(); ++i) write_events_jsonl(*f, i, logs[i]);
  }
  if (c.want_csv()) {
    if (auto f = c.open("timeseries.csv")) {
      CsvWriter w(*f, {"traj_id", "t", "x_norm", "v_norm"});
      for (std::size_t i = 0; i < logs.size(); ++i)
        for (double t : grid) {
          const State s = state_at(logs[i], flow, t);
          w.row(i, {t, s.x.norm(), s.v.norm()});
        }
    }
  }
  Json j = {{"command", "simulate"}, {"seed", c.cfg.seed}, {"n_traj", e.n_traj}, {"t_end", e.t_end}, {"events", events}};
  return emit(c, "simulate_summary.json", j, true);
}

int cmd_couple(const Context& c) {
  const PipelineResult r = run_pipeline(c.model, pipeline_options(c.cfg));
  if (!r.ok) return pipeline_failure(r);
  const CouplingParams& p = r.params;
  const auto& e = c.cfg.experiment;
  const CoupledState init = init_pair(c);
  const auto grid = effective_t_grid(e);
  const FlowIntegrator flow = FlowIntegrator::for_model(c.model);
  const LyapunovFunction w = LyapunovFunction::for_model(c.model, p.beta_exp);
  const Stream root = Stream(c.cfg.seed).split(2);
  std::vector<CoupledEventLog> logs(e.n_traj);
  parallel_for(e.n_traj, [&](std::size_t i) {
    Stream s = root.split(i);
    logs[i] = coupled_simulate(init, e.t_end, c.model, flow, p.knobs(), s);
  });

  std::size_t events = 0, coalesced = 0;
  for (const auto& l : logs) {
    events += l.events.size();
    coalesced += l.coalesced ? 1 : 0;
  }
  if (c.want_jsonl()) {
    if (auto f = c.open("events.jsonl"))
      for (std::size_t i = 0; i < logs.size(); ++i) write_events_jsonl(*f, i, logs[i]);
  }
  if (c.want_csv()) {
    if (auto f = c.open("timeseries.csv")) {
      CsvWriter out(*f, {"traj_id", "t", "x_norm", "v_norm", "r", "FG", "Phi"});
      for (std::size_t i = 0; i < logs.size(); ++i)
        for (double t : grid) {
          const CoupledState s = coupled_state_at(logs[i], flow, t);
          out.row(i, {t, s.first.x.norm(), s.first.v.norm(), distance_r(s, p), functional_FG(s, p, w),
                      semi_metric_Phi(s, w)});
        }
    }
  }
  Json j = {{"command", "couple"},   {"seed", c.cfg.seed},      {"n_traj", e.n_traj},
            {"t_end", e.t_end},      {"events", events},        {"coalesced", coalesced},
            {"params", to_json(p)}};
  return emit(c, "couple_summary.json", j, true);
}

int cmd_verify(const Context& c) {
  const auto& e = c.cfg.experiment;
  const std::string& which = c.opts.which;
  if (which == "flow") {
    if (!c.model.potential.is_quadratic()) throw Unsupported("verify flow needs a quadratic potential");
    const FlowCheck f = check_flow(c.model.gamma, c.model.potential.theta(), 1e-3, 1000, c.cfg.seed);
    return emit(c, "verify_flow.json", to_json(f), f.passed);
  }
  if (which == "generator") {
    const GeneratorCheck g = check_generator(c.model, 5, e.n_mc, c.cfg.seed);
    return emit(c, "verify_generator.json", to_json(g), g.passed);
  }
  if (which == "drift") {
    const PipelineOptions po = pipeline_options(c.cfg);
    Json j;
    bool ok = true;
    if (po.beta_exp == 2.0 && std::isfinite(c.model.density.moment(2.0))) {
      const DriftReport cf = lyapunov_drift_quadratic(c.model, po.drift);
      const DriftReport mc = lyapunov_drift_mc(c.model, 2.0, po.drift);
      const DriftAgreement ag = check_drift_agreement(mc);
      j = {{"closed_form", to_json(cf)}, {"mc", to_json(mc)}, {"agreement", to_json(ag)}};
      ok = cf.valid && mc.valid && ag.passed;
    } else {
      const DriftReport mc = lyapunov_drift_mc(c.model, po.beta_exp, po.drift);
      j = {{"mc", to_json(mc)}};
      ok = mc.valid;
    }
    j["passed"] = ok;
    return emit(c, "verify_drift.json", j, ok);
  }

  // the remaining suites need the certified coupling knobs
  const DriftReport drift = drift_for(c);
  if (!drift.valid) {
    std::cerr << "dhpdmp: drift certificate failed\n";
    return kFailed;
  }
  const BetaSolution beta = solve_beta(c.model.gamma, c.model.potential);
  if (!beta.feasible) {
    std::cerr << "dhpdmp: " << beta.reason << '\n';
    return kInfeasible;
  }
  const Geometry g = compute_geometry(c.model, drift);
  const CouplingKnobs knobs{g.alpha, g.kappa};

  if (which == "coupling") {
    const CouplingCheck cc = check_coupling(c.model, knobs, 10, e.n_mc, c.cfg.seed);
    return emit(c, "verify_coupling.json", to_json(cc), cc.passed);
  }
  if (which == "b2") {
    std::vector<double> xi;
    for (int i = 0; i < 12; ++i) xi.push_back(g.alpha * g.kappa * std::pow(1e-3, 1.0 - i / 11.0));
    B2Options bo;
    bo.n_mc = e.n_mc;
    bo.seed = c.cfg.seed;
    const B2Report b = verify_B2(c.model, LyapunovFunction::for_model(c.model, drift.beta_exp), xi, bo);
    return emit(c, "verify_b2.json", to_json(b), b.pass);
  }
  // marginals
  Json j;
  bool ok = true;
  if (c.model.rate.is_constant()) {
    const ThinningCheck t = check_thinning(c.model, e.n_traj, c.cfg.seed);
    j["thinning"] = to_json(t);
    ok = t.passed;
  }
  const MarginalCheck m = check_marginals(c.model, knobs, init_pair(c), e.t_end, e.n_traj, c.cfg.seed + 1);
  j["marginals"] = to_json(m);
  ok = ok && m.passed;
  j["passed"] = ok;
  return emit(c, "verify_marginals.json", j, ok);
}

int cmd_contract(const Context& c) {
  const PipelineResult r = run_pipeline(c.model, pipeline_options(c.cfg));
  if (!r.ok) return pipeline_failure(r);
  const auto& e = c.cfg.experiment;
  const Stream root = Stream(c.cfg.seed).split(3);
  const ContractionReport rep =
      contraction_experiment(init_pair(c), c.model, r.params, effective_t_grid(e), e.n_traj, root);
  if (c.want_csv()) {
    if (auto f = c.open("contraction.csv")) {
      CsvWriter w(*f, {"t", "mean", "stderr", "envelope"});
      for (const auto& row : rep.rows) w.row({row.t, row.mean, row.se, row.envelope});
    }
  }
  Json j = to_json(rep);
  j["params"] = to_json(r.params);
  return emit(c, "contraction_summary.json", j, rep.passed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Damped Hamiltonian PDMP: simulation, coupling and contraction checks"};
  app.require_subcommand(1);
  Options opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "JSON config file")->required();
    sub->add_option("--seed", opts.seed, "overrides the config seed");
    sub->add_option("--out", opts.out, "output directory");
    sub->add_option("--threads", opts.threads, "worker threads (0 = all cores)");
    sub->add_option("--format", opts.format, "csv or jsonl (default: both)")
        ->check(CLI::IsMember({"csv", "jsonl"}));
  };
  CLI::App* params = app.add_subcommand("params", "compute the coupling parameters and lambda*");
  CLI::App* sim = app.add_subcommand("simulate", "simulate single-chain trajectories");
  CLI::App* couple = app.add_subcommand("couple", "simulate coupled trajectories");
  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  CLI::App* contract = app.add_subcommand("contract", "contraction experiment");
  for (CLI::App* s : {params, sim, couple, verify, contract}) add_common(s);
  verify->add_option("which", opts.which, "generator | coupling | drift | b2 | marginals | flow")
      ->required()
      ->check(CLI::IsMember({"generator", "coupling", "drift", "b2", "marginals", "flow"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    Context c;
    c.opts = opts;
    c.cfg = load_config(opts.config);
    if (opts.seed) c.cfg.seed = *opts.seed;
    c.model = build_model(c.cfg.model);
    set_default_threads(opts.threads);

    if (*params) return cmd_params(c);
    if (*sim) return cmd_simulate(c);
    if (*couple) return cmd_couple(c);
    if (*verify) return cmd_verify(c);
    return cmd_contract(c);
  } catch (const ConfigError& e) {
    std::cerr << "dhpdmp: config error: " << e.what() << '\n';
    return kUsage;
  } catch (const Infeasible& e) {
    std::cerr << "dhpdmp: infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "dhpdmp: " << e.what() << '\n';
    return kUsage;
  }
}
