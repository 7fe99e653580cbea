#ifndef DHPDMP_VERIFY_HPP
#define DHPDMP_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dhpdmp/coupling.hpp"
#include "dhpdmp/lyapunov.hpp"
#include "dhpdmp/model.hpp"
#include "dhpdmp/stats.hpp"

// Verification suites shared by the command line tool and the acceptance run.

namespace dhpdmp {

struct FlowCheck {
  double sup_gap = 0.0;  // max |exact - rk4| over t in [0, 1] and all starts
  std::size_t segments = 0;
  std::size_t hamiltonian_violations = 0;
  bool passed = false;
};

/// Exact flow against RK4 with step `step` on 101 times in [0, 1] from 20
/// random starts; H checked non-increasing at 10 points along each of
/// n_segments random segments.
FlowCheck check_flow(double gamma, double theta, double step, std::size_t n_segments, std::uint64_t seed);

struct ThinningCheck {
  KsResult inter_event;  // against Exponential(lambda)
  KsResult speeds;       // post-jump |v| against the radial law of phi
  std::size_t n = 0;
  bool passed = false;
};

/// Needs a constant rate; uses the first n inter-event times and post-jump speeds.
ThinningCheck check_thinning(const ModelSpec& model, std::size_t n, std::uint64_t seed, double level = 0.01);

struct MarginalCheck {
  KsResult first_x, first_v;    // coupled first component vs single chain from init.first
  KsResult second_x, second_v;  // coupled second component vs single chain from init.second
  std::size_t n = 0;
  double t = 0.0;
  bool passed = false;
};

MarginalCheck check_marginals(const ModelSpec& model, const CouplingKnobs& knobs, const CoupledState& init,
                              double t, std::size_t n, std::uint64_t seed, double level = 0.01);

struct GeneratorCheckRow {
  std::string what;
  Vector x, v;
  double value = 0.0;
  double expected = 0.0;
  double se = 0.0;
  bool passed = false;
};

struct GeneratorCheck {
  std::vector<GeneratorCheckRow> rows;
  bool passed = false;
};

/// Constants are killed, x1 maps to v1, v1 matches -gamma v1 - d1 U - J v1,
/// and the probe is linear, at n_points random states.
GeneratorCheck check_generator(const ModelSpec& model, std::size_t n_points, std::size_t n_mc, std::uint64_t seed);

struct CouplingCheckRow {
  std::size_t pair = 0;
  std::string g, h;
  double residual = 0.0;
  double se = 0.0;
  bool passed = false;
};

struct CouplingCheck {
  std::vector<CouplingCheckRow> rows;
  std::size_t n_functions = 0;
  std::size_t n_pairs = 0;
  double worst_z = 0.0;  // max |residual| / se
  bool passed = false;
};

/// Battery g_i (+) g_{i+1} over n_pairs random pairs.
CouplingCheck check_coupling(const ModelSpec& model, const CouplingKnobs& knobs, std::size_t n_pairs,
                             std::size_t n_mc, std::uint64_t seed);

struct DriftAgreement {
  std::size_t nodes = 0;
  std::size_t disagreements = 0;
  double worst_z = 0.0;
  bool passed = false;
};

/// Every jump-integral node of an MC drift report (beta = 2) against its closed form within 3 se.
DriftAgreement check_drift_agreement(const DriftReport& mc);

struct AssignmentCheck {
  std::size_t instances = 0;
  std::size_t mismatches = 0;
  bool passed = false;
};

AssignmentCheck check_assignment(std::size_t instances, int n, std::uint64_t seed);

struct WassersteinDecay {
  double early = 0.0;  // W_Phi at t_early
  double late = 0.0;   // W_Phi at t_late
  bool passed = false;
};

/// Two single-chain ensembles from different starts; W_Phi must shrink.
WassersteinDecay check_wasserstein_decay(const ModelSpec& model, const LyapunovFunction& w, const State& a,
                                         const State& b, std::size_t n, double t_early, double t_late,
                                         std::uint64_t seed);

}  // namespace dhpdmp

#endif  // DHPDMP_VERIFY_HPP
