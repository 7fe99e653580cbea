#ifndef DHPDMP_COUPLING_HPP
#define DHPDMP_COUPLING_HPP

#include <optional>
#include <string>
#include <vector>

#include "dhpdmp/flow.hpp"
#include "dhpdmp/model.hpp"
#include "dhpdmp/random.hpp"

namespace dhpdmp {

enum class Branch { basic, reflection, residual_first, residual_second };

std::string to_string(Branch b);

/// Coupling knobs used by the simulator. Any positive values are accepted,
/// not only the certified ones.
struct CouplingKnobs {
  double alpha = 1.0;
  double kappa = 1.0;
  void validate() const;
};

struct CoupledJumpEvent {
  double time = 0.0;
  CoupledState pre;
  CoupledState post;
  Branch branch = Branch::basic;
};

struct CoupledEventLog {
  CoupledState init;
  CoupledState final_state;
  double t_end = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::size_t candidates = 0;
  bool coalesced = false;
  std::vector<CoupledJumpEvent> events;
};

/// Event-driven simulation of the coupled pair: synchronous flow between
/// candidates at rate lambda2, then a uniform U in [0, lambda2) selects
/// common (basic/reflection), residual_first, residual_second or no jump.
CoupledEventLog coupled_simulate(const CoupledState& init, double t_end, const ModelSpec& model,
                                 const CouplingKnobs& knobs, Stream& stream);
CoupledEventLog coupled_simulate(const CoupledState& init, double t_end, const ModelSpec& model,
                                 const FlowIntegrator& flow, const CouplingKnobs& knobs,
                                 Stream& stream);

/// Applies one common-branch jump at the current pair; exposed for tests.
Branch common_jump(CoupledState& pair, const DensityModel& phi, const CouplingKnobs& knobs,
                   Stream& stream);

CoupledState coupled_state_at(const CoupledEventLog& log, const FlowIntegrator& flow, double t);

/// First time the two components become identical, if ever.
std::optional<double> coalescence_time(const CoupledEventLog& log);

}  // namespace dhpdmp

#endif  // DHPDMP_COUPLING_HPP
