#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string_view>

#include "fairdyn/population.hpp"

namespace fairdyn {

enum class PolicyKind { DemographicParity, EqualityOfOpportunity, EqualizedOdds, Blind, Custom };

std::string_view to_string(PolicyKind kind);
/// Accepts the names produced by to_string; throws DomainError otherwise.
PolicyKind policy_kind_from_string(std::string_view name);

/// Member of the fair thresholding family A = I⁻¹_{1−s}(cμ + k1, c(1−μ) + k2).
///
/// Blind policies carry k1 = k2 = +∞ and store their shared threshold in `s`.
struct FairPolicy {
  double s = 0.5;
  double k1 = 0.0;
  double k2 = 0.0;
  PolicyKind kind = PolicyKind::DemographicParity;

  static FairPolicy demographic_parity(double s);
  static FairPolicy equality_of_opportunity(double s);
  /// Equal false-positive rates (k1 = 0, k2 = 1).
  static FairPolicy false_positive_parity(double s);
  /// The equalized-odds policy is the equality-of-opportunity member at the
  /// intersection rate found by equalized_odds_intersection.
  static FairPolicy equalized_odds(double s_tpr);
  static FairPolicy custom(double s, double k1, double k2);

  bool is_blind() const { return kind == PolicyKind::Blind; }
  /// Same family member with a different rate (or shared threshold, if blind).
  FairPolicy with_rate(double rate) const;

  /// Throws DomainError on an inconsistent kind/offset pair or s ∉ (0,1).
  void validate() const;
  /// Additionally checks k1 > −c·mu and k2 > −c·(1 − mu) for every state.
  void validate_for(std::span<const PopulationState> states) const;
};

/// Group-independent threshold A, expressed as the k → ∞ member of the family.
FairPolicy blind_threshold(double A);

/// Constant threshold, independent of the state.
struct FixedPolicy {
  double A0 = 0.5;
};

/// Per-group threshold of a fair policy.
double fair_threshold(const FairPolicy& policy, const PopulationState& state);

/// 1 − I_A(cμ + k1, c(1−μ) + k2): the rate the policy equalizes (selection
/// rate for DP, true-positive rate for EO, false-positive rate for k2 = 1).
/// For blind policies this is the plain selection rate.
double achieved_proportion(const FairPolicy& policy, double A, const PopulationState& state);
double achieved_proportion(PolicyKind kind, double A, const PopulationState& state);

struct EqualizedOddsSolution {
  double s_tpr = 0.5;
  double threshold_i = 0.0;
  double threshold_j = 0.0;
};

/// Scans s ∈ (0,1) for a rate where equal true-positive rates also equalize
/// false-positive rates, refining the first sign change by bisection.
/// Identical states give the canonical s = 0.5. Returns nullopt when only the
/// trivial rates satisfy both. Throws ShapeMismatchError when c differs.
std::optional<EqualizedOddsSolution> equalized_odds_intersection(const PopulationState& state_i,
                                                                 const PopulationState& state_j);

/// False-positive-rate gap FPR_i − FPR_j at the thresholds equalizing TPR at s.
double equalized_odds_gap(double s, const PopulationState& state_i,
                          const PopulationState& state_j);

}  // namespace fairdyn
