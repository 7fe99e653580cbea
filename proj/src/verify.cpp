#include "dhpdmp/verify.hpp"

#include <algorithm>
#include <cmath>

#include "dhpdmp/flow.hpp"
#include "dhpdmp/parallel.hpp"
#include "dhpdmp/pdmp.hpp"
#include "dhpdmp/probes.hpp"
#include "dhpdmp/wasserstein.hpp"

namespace dhpdmp {

namespace {

Vector normal_vector(Stream& s, int d, double scale) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = scale * s.normal();
  return v;
}

double state_gap(const State& a, const State& b) {
  return std::max((a.x - b.x).cwiseAbs().maxCoeff(), (a.v - b.v).cwiseAbs().maxCoeff());
}

}  // namespace

FlowCheck check_flow(double gamma, double theta, double step, std::size_t n_segments, std::uint64_t seed) {
  const PotentialModel pot = PotentialModel::quadratic(theta);
  const FlowIntegrator exact = FlowIntegrator::exact(gamma, pot);
  const FlowIntegrator rk = FlowIntegrator::rk4(gamma, pot, step);
  Stream s(seed);
  FlowCheck out;
  const int d = 2;
  for (int start = 0; start < 20; ++start) {
    const State s0(normal_vector(s, d, 1.0), normal_vector(s, d, 1.0));
    for (int k = 0; k <= 100; ++k) {
      const double t = k / 100.0;
      out.sup_gap = std::max(out.sup_gap, state_gap(exact.flow(s0, t), rk.flow(s0, t)));
    }
  }
  out.segments = n_segments;
  for (std::size_t i = 0; i < n_segments; ++i) {
    State cur(normal_vector(s, d, 2.0), normal_vector(s, d, 2.0));
    const double len = 2.0 * s.uniform();
    double h_prev = exact.hamiltonian(cur);
    for (int k = 0; k < 10; ++k) {
      cur = exact.flow(cur, len / 10.0);
      const double h = exact.hamiltonian(cur);
      if (h > h_prev + 1e-12 * (1.0 + h_prev)) {
        ++out.hamiltonian_violations;
        break;
      }
      h_prev = h;
    }
  }
  out.passed = out.sup_gap < 1e-8 && out.hamiltonian_violations == 0;
  return out;
}

ThinningCheck check_thinning(const ModelSpec& model, std::size_t n, std::uint64_t seed, double level) {
  require(model.rate.is_constant(), "check_thinning: needs a constant jump rate");
  require(n >= 10, "check_thinning: n must be >= 10");
  const double lambda = model.rate.lambda2();
  Stream s(seed);
  const EventLog log = simulate(State::zero(model.d), (static_cast<double>(n) + 10.0 * std::sqrt(n) + 20.0) / lambda,
                                model, s);
  require(log.events.size() >= n, "check_thinning: too few events collected");
  std::vector<double> gaps, speeds;
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    gaps.push_back(log.events[i].time - prev);
    prev = log.events[i].time;
    speeds.push_back(log.events[i].post.v.norm());
  }
  ThinningCheck out;
  out.n = n;
  out.inter_event = ks_test(gaps, [lambda](double t) { return t <= 0.0 ? 0.0 : -std::expm1(-lambda * t); });
  const DensityModel& phi = model.density;
  out.speeds = ks_test(speeds, [&phi](double r) { return phi.radial_cdf(r); });
  out.passed = out.inter_event.passes(level) && out.speeds.passes(level);
  return out;
}

MarginalCheck check_marginals(const ModelSpec& model, const CouplingKnobs& knobs, const CoupledState& init,
                              double t, std::size_t n, std::uint64_t seed, double level) {
  require(n >= 10, "check_marginals: n must be >= 10");
  const FlowIntegrator flow = FlowIntegrator::for_model(model);
  const Stream root(seed);
  const Stream cs = root.split(0), s1 = root.split(1), s2 = root.split(2);
  std::vector<double> cx1(n), cv1(n), cx2(n), cv2(n), sx1(n), sv1(n), sx2(n), sv2(n);
  parallel_for(n, [&](std::size_t i) {
    Stream a = cs.split(i);
    const CoupledState end = coupled_simulate(init, t, model, flow, knobs, a).final_state;
    cx1[i] = end.first.x.norm();
    cv1[i] = end.first.v.norm();
    cx2[i] = end.second.x.norm();
    cv2[i] = end.second.v.norm();
    Stream b = s1.split(i);
    const State e1 = simulate(init.first, t, model, flow, b).final_state;
    sx1[i] = e1.x.norm();
    sv1[i] = e1.v.norm();
    Stream c = s2.split(i);
    const State e2 = simulate(init.second, t, model, flow, c).final_state;
    sx2[i] = e2.x.norm();
    sv2[i] = e2.v.norm();
  });
  MarginalCheck out;
  out.n = n;
  out.t = t;
  out.first_x = ks_test_two_sample(cx1, sx1);
  out.first_v = ks_test_two_sample(cv1, sv1);
  out.second_x = ks_test_two_sample(cx2, sx2);
  out.second_v = ks_test_two_sample(cv2, sv2);
  out.passed = out.first_x.passes(level) && out.first_v.passes(level) && out.second_x.passes(level) &&
               out.second_v.passes(level);
  return out;
}

GeneratorCheck check_generator(const ModelSpec& model, std::size_t n_points, std::size_t n_mc, std::uint64_t seed) {
  const auto battery = standard_battery();
  const TestFunction& v1 = battery[0];
  const TestFunction& x1 = battery[1];
  const TestFunction& gauss = battery[2];
  const TestFunction& sinv = battery[5];
  const TestFunction one = constant_function(1.0);
  const TestFunction combo = linear_combination(2.0, gauss, -3.0, sinv);

  Stream root(seed);
  GeneratorCheck out;
  out.passed = true;
  for (std::size_t p = 0; p < n_points; ++p) {
    Stream ps = root.split(p);
    const State st(normal_vector(ps, model.d, 1.0), normal_vector(ps, model.d, 1.0));
    auto add = [&](std::string what, double value, double expected, double se, bool ok) {
      out.rows.push_back({std::move(what), st.x, st.v, value, expected, se, ok});
      out.passed = out.passed && ok;
    };
    Stream s = ps.split(1);
    const Estimate c = generator_probe(one, st, model, n_mc, s);
    add("constant", c.mean, 0.0, c.se, c.mean == 0.0);

    s = ps.split(2);
    const Estimate ex = generator_probe(x1, st, model, n_mc, s);
    add("x1", ex.mean, st.v[0], ex.se, std::abs(ex.mean - st.v[0]) <= 1e-12 * (1.0 + std::abs(st.v[0])));

    s = ps.split(3);
    const Estimate ev = generator_probe(v1, st, model, n_mc, s);
    const double j = model.rate(st.x, st.v);
    const double want = -model.gamma * st.v[0] - model.potential.gradient(st.x)[0] - j * st.v[0];
    add("v1", ev.mean, want, ev.se, std::abs(ev.mean - want) <= 3.0 * ev.se + 1e-12);

    // same draws for all three probes, so the linear relation holds per sample
    Stream a = ps.split(4), b = ps.split(4), cc = ps.split(4);
    const Estimate lc = generator_probe(combo, st, model, n_mc, a);
    const Estimate g1 = generator_probe(gauss, st, model, n_mc, b);
    const Estimate g2 = generator_probe(sinv, st, model, n_mc, cc);
    const double lin = 2.0 * g1.mean - 3.0 * g2.mean;
    const double se = std::sqrt(lc.se * lc.se + 4.0 * g1.se * g1.se + 9.0 * g2.se * g2.se);
    add("linearity", lc.mean, lin, se, std::abs(lc.mean - lin) <= 3.0 * se + 1e-12);
  }
  return out;
}

CouplingCheck check_coupling(const ModelSpec& model, const CouplingKnobs& knobs, std::size_t n_pairs,
                             std::size_t n_mc, std::uint64_t seed) {
  const auto battery = standard_battery();
  const std::size_t nf = battery.size();
  const Stream root(seed);
  std::vector<CoupledState> pairs;
  Stream ps = root.split(0);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    State a(normal_vector(ps, model.d, 1.0), normal_vector(ps, model.d, 1.0));
    State b(normal_vector(ps, model.d, 1.0), normal_vector(ps, model.d, 1.0));
    pairs.emplace_back(std::move(a), std::move(b));
  }
  CouplingCheck out;
  out.n_functions = nf;
  out.n_pairs = n_pairs;
  out.rows.resize(n_pairs * nf);
  const Stream probe_root = root.split(1);
  parallel_for(out.rows.size(), [&](std::size_t k) {
    const std::size_t p = k / nf, i = k % nf;
    const TestFunction& g = battery[i];
    const TestFunction& h = battery[(i + 1) % nf];
    Stream s = probe_root.split(k);
    const ProbeResidual r = coupling_operator_probe(g, h, pairs[p], model, knobs, n_mc, s);
    out.rows[k] = {p, g.name, h.name, r.residual, r.se, r.passes(3.0)};
  });
  out.passed = true;
  for (const auto& r : out.rows) {
    out.passed = out.passed && r.passed;
    // residuals at round-off level carry no statistical information
    if (r.se > 0.0 && std::abs(r.residual) > 1e-12) out.worst_z = std::max(out.worst_z, std::abs(r.residual) / r.se);
  }
  return out;
}

DriftAgreement check_drift_agreement(const DriftReport& mc) {
  require(mc.beta_exp == 2.0, "check_drift_agreement: needs an MC report with beta = 2");
  DriftAgreement out;
  for (const auto& node : mc.jump_nodes) {
    ++out.nodes;
    const double diff = std::abs(node.integral.mean - node.closed_form);
    const double tol = 3.0 * node.integral.se + 1e-12 * std::abs(node.closed_form);
    if (!(diff <= tol)) ++out.disagreements;
    if (node.integral.se > 0.0) out.worst_z = std::max(out.worst_z, diff / node.integral.se);
  }
  out.passed = out.nodes > 0 && out.disagreements == 0;
  return out;
}

AssignmentCheck check_assignment(std::size_t instances, int n, std::uint64_t seed) {
  Stream s(seed);
  AssignmentCheck out;
  out.instances = instances;
  for (std::size_t k = 0; k < instances; ++k) {
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) cost(i, j) = s.uniform() * 10.0;
    const Assignment h = solve_assignment(cost);
    const Assignment b = brute_force_assignment(cost);
    if (h.match != b.match || h.cost != b.cost) ++out.mismatches;
  }
  out.passed = out.mismatches == 0;
  return out;
}

WassersteinDecay check_wasserstein_decay(const ModelSpec& model, const LyapunovFunction& w, const State& a,
                                         const State& b, std::size_t n, double t_early, double t_late,
                                         std::uint64_t seed) {
  require(t_early > 0.0 && t_late > t_early, "check_wasserstein_decay: need 0 < t_early < t_late");
  const FlowIntegrator flow = FlowIntegrator::for_model(model);
  const Stream root(seed);
  const Stream sa = root.split(0), sb = root.split(1);
  std::vector<State> ea(n), eb(n), la(n), lb(n);
  parallel_for(n, [&](std::size_t i) {
    Stream s1 = sa.split(i), s2 = sb.split(i);
    const EventLog l1 = simulate(a, t_late, model, flow, s1);
    const EventLog l2 = simulate(b, t_late, model, flow, s2);
    ea[i] = state_at(l1, flow, t_early);
    eb[i] = state_at(l2, flow, t_early);
    la[i] = l1.final_state;
    lb[i] = l2.final_state;
  });
  WassersteinDecay out;
  out.early = empirical_wasserstein(ea, eb, w);
  out.late = empirical_wasserstein(la, lb, w);
  out.passed = out.late < out.early;
  return out;
}

}  // namespace dhpdmp
