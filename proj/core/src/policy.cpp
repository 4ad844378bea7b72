#include "fairdyn/policy.hpp"

#include <cmath>
#include <string>

#include "fairdyn/error.hpp"
#include "fairdyn/roots.hpp"
#include "fairdyn/specfun.hpp"

namespace fairdyn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_rate(double s) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("policy rate s must lie in (0,1), got " + std::to_string(s));
}

specfun::BetaParams shifted(const PopulationState& state, double k1, double k2) {
  return {state.c * state.mu + k1, state.c * (1.0 - state.mu) + k2};
}

}  // namespace

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::DemographicParity: return "demographic_parity";
    case PolicyKind::EqualityOfOpportunity: return "equality_of_opportunity";
    case PolicyKind::EqualizedOdds: return "equalized_odds";
    case PolicyKind::Blind: return "blind";
    case PolicyKind::Custom: return "custom";
  }
  return "custom";
}

PolicyKind policy_kind_from_string(std::string_view name) {
  for (auto kind : {PolicyKind::DemographicParity, PolicyKind::EqualityOfOpportunity,
                    PolicyKind::EqualizedOdds, PolicyKind::Blind, PolicyKind::Custom}) {
    if (name == to_string(kind)) return kind;
  }
  throw DomainError("unknown policy kind '" + std::string(name) + "'");
}

FairPolicy FairPolicy::demographic_parity(double s) {
  check_rate(s);
  return {s, 0.0, 0.0, PolicyKind::DemographicParity};
}

FairPolicy FairPolicy::equality_of_opportunity(double s) {
  check_rate(s);
  return {s, 1.0, 0.0, PolicyKind::EqualityOfOpportunity};
}

FairPolicy FairPolicy::false_positive_parity(double s) {
  check_rate(s);
  return {s, 0.0, 1.0, PolicyKind::Custom};
}

FairPolicy FairPolicy::equalized_odds(double s_tpr) {
  check_rate(s_tpr);
  return {s_tpr, 1.0, 0.0, PolicyKind::EqualizedOdds};
}

FairPolicy FairPolicy::custom(double s, double k1, double k2) {
  check_rate(s);
  if (!std::isfinite(k1) || !std::isfinite(k2)) throw DomainError("custom policy offsets must be finite");
  return {s, k1, k2, PolicyKind::Custom};
}

FairPolicy FairPolicy::with_rate(double rate) const {
  FairPolicy out = *this;
  out.s = rate;
  out.validate();
  return out;
}

void FairPolicy::validate() const {
  switch (kind) {
    case PolicyKind::Blind:
      if (!(s >= 0.0 && s <= 1.0)) throw DomainError("blind threshold must lie in [0,1]");
      if (k1 != kInf || k2 != kInf) throw DomainError("blind policy must carry infinite offsets");
      return;
    case PolicyKind::DemographicParity:
      if (k1 != 0.0 || k2 != 0.0) throw DomainError("demographic parity requires k1 = k2 = 0");
      break;
    case PolicyKind::EqualityOfOpportunity:
    case PolicyKind::EqualizedOdds:
      if (k1 != 1.0 || k2 != 0.0) throw DomainError(std::string(to_string(kind)) + " requires k1 = 1, k2 = 0");
      break;
    case PolicyKind::Custom:
      if (!std::isfinite(k1) || !std::isfinite(k2)) throw DomainError("custom policy offsets must be finite");
      break;
  }
  check_rate(s);
}

void FairPolicy::validate_for(std::span<const PopulationState> states) const {
  validate();
  if (is_blind()) return;
  for (const auto& state : states) {
    state.validate();
    if (!(k1 > -state.a())) throw DomainError("policy offset k1 below -c*mu for a group");
    if (!(k2 > -state.b())) throw DomainError("policy offset k2 below -c*(1-mu) for a group");
  }
}

FairPolicy blind_threshold(double A) {
  if (!(A >= 0.0 && A <= 1.0)) throw DomainError("blind threshold must lie in [0,1]");
  return {A, kInf, kInf, PolicyKind::Blind};
}

double fair_threshold(const FairPolicy& policy, const PopulationState& state) {
  const PopulationState one[] = {state};
  policy.validate_for(one);
  if (policy.is_blind()) return policy.s;
  return specfun::inv_reg_inc_beta_upper(policy.s, shifted(state, policy.k1, policy.k2));
}

double achieved_proportion(const FairPolicy& policy, double A, const PopulationState& state) {
  if (policy.is_blind()) return specfun::selected_proportion(A, state.mu, state.c);
  const PopulationState one[] = {state};
  policy.validate_for(one);
  return specfun::reg_inc_beta_upper(A, shifted(state, policy.k1, policy.k2));
}

double achieved_proportion(PolicyKind kind, double A, const PopulationState& state) {
  state.validate();
  switch (kind) {
    case PolicyKind::DemographicParity:
    case PolicyKind::Blind:
      return specfun::selected_proportion(A, state.mu, state.c);
    case PolicyKind::EqualityOfOpportunity:
    case PolicyKind::EqualizedOdds:
      return specfun::reg_inc_beta_upper(A, shifted(state, 1.0, 0.0));
    case PolicyKind::Custom:
      break;
  }
  throw DomainError("achieved_proportion: custom policies need explicit offsets");
}

double equalized_odds_gap(double s, const PopulationState& state_i,
                          const PopulationState& state_j) {
  const FairPolicy tpr = FairPolicy::equality_of_opportunity(s);
  const double Ai = fair_threshold(tpr, state_i);
  const double Aj = fair_threshold(tpr, state_j);
  return specfun::reg_inc_beta_upper(Ai, shifted(state_i, 0.0, 1.0)) -
         specfun::reg_inc_beta_upper(Aj, shifted(state_j, 0.0, 1.0));
}

std::optional<EqualizedOddsSolution> equalized_odds_intersection(const PopulationState& state_i,
                                                                 const PopulationState& state_j) {
  state_i.validate();
  state_j.validate();
  if (state_i.c != state_j.c) throw ShapeMismatchError("equalized odds requires groups with a shared shape c");

  if (state_i.mu == state_j.mu) {
    const double A = fair_threshold(FairPolicy::equality_of_opportunity(0.5), state_i);
    return EqualizedOddsSolution{0.5, A, A};
  }

  constexpr int kScan = 999;
  constexpr double kNoise = 1e-12;
  auto gap = [&](double s) { return equalized_odds_gap(s, state_i, state_j); };
  double prev_s = 1.0 / (kScan + 1);
  double prev = gap(prev_s);
  for (int k = 2; k <= kScan; ++k) {
    const double s = static_cast<double>(k) / (kScan + 1);
    const double cur = gap(s);
    if (std::fabs(prev) > kNoise && std::fabs(cur) > kNoise && (prev > 0.0) != (cur > 0.0)) {
      const double root = bisect(gap, prev_s, s, 1e-13).x;
      const FairPolicy tpr = FairPolicy::equality_of_opportunity(root);
      return EqualizedOddsSolution{root, fair_threshold(tpr, state_i), fair_threshold(tpr, state_j)};
    }
    prev_s = s;
    prev = cur;
  }
  return std::nullopt;
}

}  // namespace fairdyn
