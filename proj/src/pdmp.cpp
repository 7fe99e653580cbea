#include "dhpdmp/pdmp.hpp"

#include <algorithm>
#include <cmath>

namespace dhpdmp {

EventLog simulate(const State& init, double t_end, const ModelSpec& model, Stream& stream) {
  return simulate(init, t_end, model, FlowIntegrator::for_model(model), stream);
}

EventLog simulate(const State& init, double t_end, const ModelSpec& model,
                  const FlowIntegrator& flow, Stream& stream) {
  require(t_end > 0.0 && std::isfinite(t_end), "simulate: t_end must be finite and > 0");
  require(init.dim() == model.d, "simulate: initial state dimension differs from model d");
  const double lambda2 = model.rate.lambda2();

  EventLog log;
  log.init = init;
  log.t_end = t_end;
  log.seed = stream.seed();
  log.stream_id = stream.id();

  Vector x = init.x;
  Vector v = init.v;
  double t = 0.0;
  for (;;) {
    const double tau = stream.exponential(lambda2);
    if (t + tau > t_end) {
      flow.advance(x, v, t_end - t);
      break;
    }
    flow.advance(x, v, tau);
    t += tau;
    ++log.candidates;
    const double rate = model.rate(x, v);
    if (rate > lambda2 * (1.0 + 1e-12)) throw InvalidArgument("simulate: J exceeds lambda2");
    if (stream.uniform() * lambda2 < rate) {
      JumpEvent ev;
      ev.time = t;
      ev.pre = State(x, v);
      v = model.density.sample(stream);
      ev.post = State(x, v);
      log.events.push_back(std::move(ev));
    }
  }
  log.final_state = State(x, v);
  return log;
}

State state_at(const EventLog& log, const FlowIntegrator& flow, double t) {
  require(t >= 0.0 && t <= log.t_end, "state_at: t outside [0, t_end]");
  auto it = std::upper_bound(log.events.begin(), log.events.end(), t,
                             [](double tt, const JumpEvent& e) { return tt < e.time; });
  if (it == log.events.begin()) return flow.flow(log.init, t);
  const JumpEvent& last = *std::prev(it);
  return flow.flow(last.post, t - last.time);
}

}  // namespace dhpdmp
