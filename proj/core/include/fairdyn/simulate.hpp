#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fairdyn/control.hpp"
#include "fairdyn/dynamics.hpp"
#include "fairdyn/policy.hpp"
#include "fairdyn/population.hpp"

namespace fairdyn {

struct GroupSpec {
  GroupLabel label;
  PopulationState state;
  DynamicsParams params;
};

/// Unconstrained optimal lending, applied to each group independently.
/// Holds either one value function shared by all groups or one per group.
struct OptimalPolicy {
  std::vector<std::shared_ptr<const ValueFunction>> value_functions;

  const ValueFunction& for_group(std::size_t g) const;
};

/// A fair family whose rate is re-chosen every step by the lender.
///
/// For threshold families the rate s maximizes Σ_i g(A_i(s), μ_i) +
/// γ·Ĵ(f(A_i(s), μ_i)) over a uniform rate mesh, Ĵ being the unconstrained
/// value function. Blind policies use the unconstrained optimal threshold at
/// the pooled (unweighted) mean.
struct LenderOptimalFairPolicy {
  FairPolicy family;
  std::shared_ptr<const ValueFunction> value;
  std::size_t rate_grid = 199;
};

using Policy = std::variant<FairPolicy, FixedPolicy, OptimalPolicy, LenderOptimalFairPolicy>;

std::string describe(const Policy& policy);

struct GroupRecord {
  double mu = 0.0;
  double threshold = 0.0;
  double p_plus = 0.0;
  double mu_plus = 0.0;
  double reward = 0.0;
};

struct TrajectoryStep {
  std::size_t t = 0;
  std::vector<GroupRecord> groups;
};

/// Row t holds the mean at time t and the decision taken on it; the mean in
/// row t + 1 is its result. The decision in the last row is not applied.
struct Trajectory {
  std::vector<GroupLabel> labels;
  std::vector<DynamicsParams> params;
  LenderParams lender;
  std::string policy;
  std::vector<TrajectoryStep> steps;

  std::size_t group_count() const { return labels.size(); }
  std::vector<double> means(std::size_t group) const;
  std::vector<double> final_means() const;
};

/// Evolves all groups for T steps. Fair policies require a shared c
/// (ShapeMismatchError otherwise).
Trajectory simulate(std::span<const GroupSpec> groups, const Policy& policy, std::size_t T,
                    const LenderParams& lender);

struct ParityGap {
  double final_gap = 0.0;
  std::vector<double> series;
};

/// |μ⁽⁰⁾_t − μ⁽¹⁾_t| per step; requires exactly two groups.
ParityGap parity_gap(const Trajectory& traj);

inline constexpr double kParityTolerance = 1e-3;

struct FairVerdict {
  Trajectory trajectory;
  ParityGap gap;
  bool converged = false;
  /// Every group satisfies R ≤ β/ν − 1; otherwise the verdict is informational.
  bool within_bound = true;

  std::string verdict() const;
};

FairVerdict fair_constrained_simulation(std::span<const GroupSpec> groups, const FairPolicy& policy,
                                        const LenderParams& lender, std::size_t T);

}  // namespace fairdyn
