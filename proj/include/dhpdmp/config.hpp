#ifndef DHPDMP_CONFIG_HPP
#define DHPDMP_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dhpdmp/model.hpp"

namespace dhpdmp {

/// Malformed or inconsistent configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PotentialConfig {
  std::string kind = "quadratic";
  double theta = 1.0;
  bool operator==(const PotentialConfig&) const = default;
};

struct RateConfig {
  std::string kind = "constant";  // constant | sinusoidal_bounded | expression
  double lambda1 = 2.0;
  double lambda2 = 2.0;
  std::optional<double> lambdaJ;  // required for expression
  std::string expr;               // expression only
  bool operator==(const RateConfig&) const = default;
};

struct DensityConfig {
  std::string kind = "standard_gaussian";  // standard_gaussian | heavy_tail | stretched_exp
  std::optional<double> param;             // beta1 or beta2
  bool operator==(const DensityConfig&) const = default;
};

struct ModelConfig {
  int d = 2;
  double gamma = 4.0;
  PotentialConfig potential;
  RateConfig rate;
  DensityConfig density;
  bool operator==(const ModelConfig&) const = default;
};

struct InitConfig {
  std::vector<double> x;
  std::vector<double> v;
  bool operator==(const InitConfig&) const = default;
};

struct ExperimentConfig {
  double t_end = 10.0;
  std::size_t n_traj = 1000;
  std::vector<double> t_grid;  // empty: 0, 0.5, ..., t_end
  std::size_t n_mc = 100000;
  int grid_points = 41;        // drift grid points per axis
  double beta_exp = 2.0;
  std::optional<InitConfig> init;   // default: x = e1, v = 0
  std::optional<InitConfig> init2;  // default: origin
  bool operator==(const ExperimentConfig&) const = default;
};

struct RunConfig {
  ModelConfig model;
  ExperimentConfig experiment;
  std::uint64_t seed = 1;
  bool operator==(const RunConfig&) const = default;
};

/// Parses the JSON config. Unknown keys, wrong types and out-of-range values
/// throw ConfigError naming the offending key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

ModelSpec build_model(const ModelConfig& cfg);

/// Time grid actually used: the configured one or 0, 0.5, ..., t_end.
std::vector<double> effective_t_grid(const ExperimentConfig& e);
State initial_state(const ExperimentConfig& e, int d, bool second);

}  // namespace dhpdmp

#endif  // DHPDMP_CONFIG_HPP
