#pragma once

#include "fairdyn/population.hpp"

namespace fairdyn {

/// Evolution constants: repayment benefit beta, no-loan reversion mean nu and
/// misestimation level alpha (alpha = 0 is exact knowledge).
struct DynamicsParams {
  double beta = 0.99;
  double nu = 0.2;
  double alpha = 0.0;

  /// Throws DomainError unless all three lie in [0,1].
  void validate() const;

  friend bool operator==(const DynamicsParams&, const DynamicsParams&) = default;
};

/// One application of the update at threshold A.
struct StepResult {
  double p_plus = 0.0;   ///< proportion above the threshold
  double mu_plus = 0.0;  ///< mean among the selected; A when nobody is selected
  double next = 0.0;     ///< f(A, mu)
};

/// f = β·p₊·((1 − α)·μ₊ + α·μ) + ν·(1 − p₊), with f = ν when p₊ = 0.
StepResult step(double A, const PopulationState& state, const DynamicsParams& params);

double step_mean(double A, const PopulationState& state, const DynamicsParams& params);

/// ∂f/∂α = β·p₊·(μ − μ₊); zero at A = 0 and whenever p₊ = 0.
double misestimation_sensitivity(double A, const PopulationState& state,
                                 const DynamicsParams& params);

}  // namespace fairdyn
