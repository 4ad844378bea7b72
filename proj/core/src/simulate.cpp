#include "fairdyn/simulate.hpp"

#include <cmath>
#include <limits>

#include "fairdyn/error.hpp"

namespace fairdyn {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<PopulationState> states_of(const std::vector<GroupSpec>& groups) {
  std::vector<PopulationState> out;
  out.reserve(groups.size());
  for (const auto& g : groups) out.push_back(g.state);
  return out;
}

void require_shared_shape(const std::vector<GroupSpec>& groups) {
  const auto states = states_of(groups);
  if (!shared_shape(states)) throw ShapeMismatchError("fair policies require all groups to share the shape c");
}

std::vector<double> fair_thresholds(const FairPolicy& policy, const std::vector<GroupSpec>& groups) {
  std::vector<double> out;
  out.reserve(groups.size());
  for (const auto& g : groups) out.push_back(fair_threshold(policy, g.state));
  return out;
}

std::vector<double> lender_optimal_thresholds(const LenderOptimalFairPolicy& policy,
                                              const std::vector<GroupSpec>& groups) {
  const ValueFunction& vf = *policy.value;
  if (policy.family.is_blind()) {
    double pooled = 0.0;
    for (const auto& g : groups) pooled += g.state.mu;
    pooled /= static_cast<double>(groups.size());
    return std::vector<double>(groups.size(), vf.policy_at(pooled));
  }
  const std::size_t n = std::max<std::size_t>(policy.rate_grid, 2);
  const double lo = 0.005;
  const double hi = 0.995;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> chosen;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    const FairPolicy member = policy.family.with_rate(s);
    std::vector<double> A = fair_thresholds(member, groups);
    double total = 0.0;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      const StepResult r = step(A[i], groups[i].state, groups[i].params);
      const double g = r.p_plus > 0.0 ? r.p_plus * ((1.0 + vf.lender.R) * r.mu_plus - 1.0) : 0.0;
      total += g + vf.lender.gamma * vf.value(r.next);
    }
    if (total > best) {
      best = total;
      chosen = std::move(A);
    }
  }
  return chosen;
}

}  // namespace

const ValueFunction& OptimalPolicy::for_group(std::size_t g) const {
  if (value_functions.empty()) throw DomainError("optimal policy has no value function");
  const auto& vf = value_functions.size() == 1 ? value_functions.front() : value_functions.at(g);
  if (!vf) throw DomainError("optimal policy value function is null");
  return *vf;
}

std::string describe(const Policy& policy) {
  return std::visit(overloaded{
                        [](const FairPolicy& p) {
                          if (p.is_blind()) return std::string("blind(A=") + std::to_string(p.s) + ")";
                          return std::string(to_string(p.kind)) + "(s=" + std::to_string(p.s) + ")";
                        },
                        [](const FixedPolicy& p) { return "fixed(A=" + std::to_string(p.A0) + ")"; },
                        [](const OptimalPolicy&) { return std::string("optimal"); },
                        [](const LenderOptimalFairPolicy& p) {
                          return std::string(to_string(p.family.kind)) + "(lender-optimal)";
                        },
                    },
                    policy);
}

std::vector<double> Trajectory::means(std::size_t group) const {
  std::vector<double> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.groups.at(group).mu);
  return out;
}

std::vector<double> Trajectory::final_means() const {
  if (steps.empty()) return {};
  std::vector<double> out;
  for (const auto& g : steps.back().groups) out.push_back(g.mu);
  return out;
}

Trajectory simulate(std::span<const GroupSpec> groups_in, const Policy& policy, std::size_t T,
                    const LenderParams& lender) {
  if (T < 1) throw DomainError("simulate: horizon T must be at least 1");
  if (groups_in.empty()) throw DomainError("simulate: no groups");
  std::vector<GroupSpec> groups(groups_in.begin(), groups_in.end());
  for (const auto& g : groups) {
    g.state.validate();
    g.params.validate();
  }

  std::visit(overloaded{
                 [&](const FairPolicy& p) {
                   require_shared_shape(groups);
                   p.validate_for(states_of(groups));
                 },
                 [&](const FixedPolicy& p) {
                   if (!(p.A0 >= 0.0 && p.A0 <= 1.0)) throw DomainError("fixed threshold must lie in [0,1]");
                 },
                 [&](const OptimalPolicy& p) {
                   for (std::size_t i = 0; i < groups.size(); ++i) {
                     if (p.for_group(i).c != groups[i].state.c) {
                       throw ShapeMismatchError("optimal policy was solved for a different shape c");
                     }
                   }
                 },
                 [&](const LenderOptimalFairPolicy& p) {
                   require_shared_shape(groups);
                   p.family.validate_for(states_of(groups));
                   if (!p.value) throw DomainError("lender-optimal fair policy needs a value function");
                 },
             },
             policy);

  Trajectory traj;
  traj.lender = lender;
  traj.policy = describe(policy);
  for (const auto& g : groups) {
    traj.labels.push_back(g.label);
    traj.params.push_back(g.params);
  }
  traj.steps.reserve(T + 1);

  for (std::size_t t = 0; t <= T; ++t) {
    std::vector<double> A = std::visit(
        overloaded{
            [&](const FairPolicy& p) { return fair_thresholds(p, groups); },
            [&](const FixedPolicy& p) { return std::vector<double>(groups.size(), p.A0); },
            [&](const OptimalPolicy& p) {
              std::vector<double> out;
              for (std::size_t i = 0; i < groups.size(); ++i) out.push_back(p.for_group(i).policy_at(groups[i].state.mu));
              return out;
            },
            [&](const LenderOptimalFairPolicy& p) { return lender_optimal_thresholds(p, groups); },
        },
        policy);

    TrajectoryStep row;
    row.t = t;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      const StepResult r = step(A[i], groups[i].state, groups[i].params);
      GroupRecord rec;
      rec.mu = groups[i].state.mu;
      rec.threshold = A[i];
      rec.p_plus = r.p_plus;
      rec.mu_plus = r.mu_plus;
      rec.reward = r.p_plus > 0.0 ? r.p_plus * ((1.0 + lender.R) * r.mu_plus - 1.0) : 0.0;
      row.groups.push_back(rec);
      if (t < T) groups[i].state.mu = clamp_mean(r.next);
    }
    traj.steps.push_back(std::move(row));
  }
  return traj;
}

ParityGap parity_gap(const Trajectory& traj) {
  if (traj.group_count() != 2) throw DomainError("parity_gap requires exactly two groups");
  ParityGap out;
  out.series.reserve(traj.steps.size());
  for (const auto& s : traj.steps) out.series.push_back(std::fabs(s.groups[0].mu - s.groups[1].mu));
  out.final_gap = out.series.empty() ? 0.0 : out.series.back();
  return out;
}

std::string FairVerdict::verdict() const {
  if (!within_bound) return converged ? "converged (informational)" : "not converged (informational)";
  return converged ? "converged" : "not converged";
}

FairVerdict fair_constrained_simulation(std::span<const GroupSpec> groups, const FairPolicy& policy,
                                        const LenderParams& lender, std::size_t T) {
  if (groups.size() != 2) throw DomainError("fair_constrained_simulation requires exactly two groups");
  FairVerdict out;
  out.trajectory = simulate(groups, policy, T, lender);
  out.gap = parity_gap(out.trajectory);
  out.converged = out.gap.final_gap < kParityTolerance;
  for (const auto& g : groups) {
    const double limit = g.params.nu > 0.0 ? g.params.beta / g.params.nu - 1.0 : std::numeric_limits<double>::infinity();
    if (lender.R > limit) out.within_bound = false;
  }
  return out;
}

}  // namespace fairdyn
