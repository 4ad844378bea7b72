#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <fairdyn/fairdyn.hpp>

namespace fairdyn::cli {

using json = nlohmann::ordered_json;

/// Invalid configuration; `field` is a path such as `groups[1].mu`.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct GroupConfig {
  std::string name;
  double mu = 0.5;
  double c = 2.0;
  double alpha = 0.0;
};

enum class PolicyType { Optimal, Fixed, Greedy, Fair };
enum class RateMode { Fixed, LenderOptimal };

struct PolicyConfig {
  PolicyType type = PolicyType::Optimal;
  std::string label;
  /// Fair policies only.
  PolicyKind kind = PolicyKind::DemographicParity;
  RateMode rate = RateMode::Fixed;
  std::optional<double> s;
  std::optional<double> k1;
  std::optional<double> k2;
  /// Fixed threshold, or the shared threshold of a blind policy.
  std::optional<double> A;

  std::string display_name() const;
};

struct SolverConfig {
  std::size_t grid_size = 513;
  double tol = 1e-9;
  std::size_t action_grid = 257;
};

struct BifurcationConfig {
  std::size_t mu0_steps = 41;
  std::size_t horizon = 500;
};

struct OutputConfig {
  std::string dir = ".";
  bool gnuplot = false;
};

struct ScenarioConfig {
  std::vector<GroupConfig> groups;
  double beta = 0.99;
  double nu = 0.2;
  double R = 0.25;
  double gamma = 0.6;
  PolicyConfig policy;
  std::vector<PolicyConfig> policies;
  std::size_t horizon = 200;
  SolverConfig solver;
  std::size_t A_steps = 1001;
  BifurcationConfig bifurcation;
  OutputConfig output;

  DynamicsParams dynamics_for(std::size_t group) const;
  LenderParams lender() const;
  BellmanOptions bellman() const;
  std::vector<GroupSpec> group_specs() const;
};

/// Builds a config from JSON, filling defaults; unknown keys are rejected.
ScenarioConfig parse_config(const json& j);
json to_json(const ScenarioConfig& config);
json to_json(const PolicyConfig& policy);

/// Checks every precondition the commands rely on; throws ConfigError.
void validate(const ScenarioConfig& config);
void validate(const PolicyConfig& policy, const ScenarioConfig& config, const std::string& field);

/// Applies `path=value` (e.g. `dynamics.beta=0.99`, `groups[0].mu=0.4`). The
/// value is read as JSON when possible and as a string otherwise.
void apply_override(json& j, const std::string& assignment);

json load_json_file(const std::string& path);

}  // namespace fairdyn::cli
