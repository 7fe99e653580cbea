#include "dhpdmp/coupling.hpp"

#include <algorithm>
#include <cmath>

namespace dhpdmp {

std::string to_string(Branch b) {
  switch (b) {
    case Branch::basic: return "basic";
    case Branch::reflection: return "reflection";
    case Branch::residual_first: return "residual_first";
    case Branch::residual_second: return "residual_second";
  }
  return "unknown";
}

void CouplingKnobs::validate() const {
  require(alpha > 0.0 && std::isfinite(alpha), "coupling: alpha must be > 0");
  require(kappa > 0.0 && std::isfinite(kappa), "coupling: kappa must be > 0");
}

Branch common_jump(CoupledState& pair, const DensityModel& phi, const CouplingKnobs& knobs,
                   Stream& stream) {
  const Vector zk = truncate(pair.z(), knobs.kappa);
  const Vector xi = knobs.alpha * zk;
  Vector u = phi.sample(stream);
  const double ratio = phi.overlap_ratio(u, xi);
  // psi_xi / phi = ratio splits phi into the basic and reflection parts
  if (ratio >= 1.0 || stream.uniform() < ratio) {
    pair.second.v = u + xi;
    pair.first.v = std::move(u);
    return Branch::basic;
  }
  pair.second.v = reflect(zk, u);
  pair.first.v = std::move(u);
  return Branch::reflection;
}

CoupledEventLog coupled_simulate(const CoupledState& init, double t_end, const ModelSpec& model,
                                 const CouplingKnobs& knobs, Stream& stream) {
  return coupled_simulate(init, t_end, model, FlowIntegrator::for_model(model), knobs, stream);
}

CoupledEventLog coupled_simulate(const CoupledState& init, double t_end, const ModelSpec& model,
                                 const FlowIntegrator& flow, const CouplingKnobs& knobs,
                                 Stream& stream) {
  knobs.validate();
  require(t_end > 0.0 && std::isfinite(t_end), "coupled_simulate: t_end must be finite and > 0");
  require(init.dim() == model.d, "coupled_simulate: dimension differs from model d");
  const double lambda2 = model.rate.lambda2();

  CoupledEventLog log;
  log.init = init;
  log.t_end = t_end;
  log.seed = stream.seed();
  log.stream_id = stream.id();
  log.coalesced = init.coalesced();

  CoupledState pair = init;
  double t = 0.0;
  for (;;) {
    const double tau = stream.exponential(lambda2);
    if (t + tau > t_end) {
      flow.advance(pair.first.x, pair.first.v, t_end - t);
      flow.advance(pair.second.x, pair.second.v, t_end - t);
      break;
    }
    flow.advance(pair.first.x, pair.first.v, tau);
    flow.advance(pair.second.x, pair.second.v, tau);
    t += tau;
    ++log.candidates;

    const double a = model.rate(pair.first);
    const double b = model.rate(pair.second);
    const double common = std::min(a, b);
    const double first_only = std::max(a - b, 0.0);
    const double second_only = std::max(b - a, 0.0);
    const double total = common + first_only + second_only;
    if (std::abs(total - std::max(a, b)) > 1e-12 * lambda2 || std::max(a, b) > lambda2 * (1.0 + 1e-12)) {
      throw InvalidArgument("coupled_simulate: branch intensities exceed lambda2");
    }

    const double u = stream.uniform() * lambda2;
    if (u >= total) continue;

    CoupledJumpEvent ev;
    ev.time = t;
    ev.pre = pair;
    if (u < common) {
      ev.branch = common_jump(pair, model.density, knobs, stream);
    } else if (u < common + first_only) {
      ev.branch = Branch::residual_first;
      pair.first.v = model.density.sample(stream);
    } else {
      ev.branch = Branch::residual_second;
      pair.second.v = model.density.sample(stream);
    }
    ev.post = pair;
    if (!log.coalesced && pair.coalesced()) log.coalesced = true;
    log.events.push_back(std::move(ev));
  }
  log.final_state = pair;
  return log;
}

CoupledState coupled_state_at(const CoupledEventLog& log, const FlowIntegrator& flow, double t) {
  require(t >= 0.0 && t <= log.t_end, "coupled_state_at: t outside [0, t_end]");
  auto it = std::upper_bound(log.events.begin(), log.events.end(), t,
                             [](double tt, const CoupledJumpEvent& e) { return tt < e.time; });
  if (it == log.events.begin()) return coupled_flow(flow, log.init, t);
  const CoupledJumpEvent& last = *std::prev(it);
  return coupled_flow(flow, last.post, t - last.time);
}

std::optional<double> coalescence_time(const CoupledEventLog& log) {
  if (log.init.coalesced()) return 0.0;
  for (const auto& ev : log.events) {
    if (ev.post.coalesced()) return ev.time;
  }
  return std::nullopt;
}

}  // namespace dhpdmp
