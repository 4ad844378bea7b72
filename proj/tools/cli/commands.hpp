#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"

namespace fairdyn::cli {

/// Value functions keyed by (c, alpha), solved on first use.
class ValueFunctionCache {
 public:
  explicit ValueFunctionCache(const ScenarioConfig& config) : config_(config) {}
  std::shared_ptr<const ValueFunction> get(double c, double alpha);

 private:
  const ScenarioConfig& config_;
  std::map<std::pair<double, double>, std::shared_ptr<const ValueFunction>> cache_;
};

Policy build_policy(const PolicyConfig& policy, const ScenarioConfig& config, ValueFunctionCache& cache);

/// Each command writes its files under config.output.dir and returns the
/// summary JSON that is also printed on stdout. Warnings go to `log`.
json cmd_simulate(const ScenarioConfig& config, std::ostream& log);
json cmd_equilibrium_curve(const ScenarioConfig& config, std::ostream& log);
json cmd_optimal_policy(const ScenarioConfig& config, bool lemma1, std::ostream& log);
json cmd_compare_policies(const ScenarioConfig& config, std::ostream& log);

struct FitOptions {
  PipelineOptions pipeline;
};
json cmd_fit(const std::string& data_path, const FitOptions& options, std::ostream& log);

/// Uniqueness scan over the standard grid plus the special-function identity
/// suite. `passed` is false if any check fails.
json cmd_selfcheck(std::ostream& log);

}  // namespace fairdyn::cli
