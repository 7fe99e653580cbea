#ifndef DHPDMP_PDMP_HPP
#define DHPDMP_PDMP_HPP

#include <cstdint>
#include <vector>

#include "dhpdmp/flow.hpp"
#include "dhpdmp/model.hpp"
#include "dhpdmp/random.hpp"

namespace dhpdmp {

struct JumpEvent {
  double time = 0.0;
  State pre;
  State post;
};

/// Accepted collisions of one trajectory on [0, t_end].
struct EventLog {
  State init;
  State final_state;
  double t_end = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::size_t candidates = 0;
  std::vector<JumpEvent> events;
};

/// Single-chain simulation by thinning: candidates at rate lambda2, each
/// accepted with probability J(x, v) / lambda2; an accepted candidate
/// replaces v by a fresh draw from phi and keeps x.
EventLog simulate(const State& init, double t_end, const ModelSpec& model, Stream& stream);
EventLog simulate(const State& init, double t_end, const ModelSpec& model,
                  const FlowIntegrator& flow, Stream& stream);

/// State at time t in [0, t_end], flowing from the last event at or before t.
State state_at(const EventLog& log, const FlowIntegrator& flow, double t);

}  // namespace dhpdmp

#endif  // DHPDMP_PDMP_HPP
