#pragma once

#include <span>
#include <string>
#include <vector>

namespace fairdyn {

/// Means are kept inside [kMeanFloor, 1 - kMeanFloor].
inline constexpr double kMeanFloor = 1e-6;
inline constexpr double kMinShape = 1e-3;

/// One group's repayment-probability distribution, Beta(c·mu, c·(1 − mu)).
struct PopulationState {
  double mu = 0.5;
  double c = 2.0;

  /// Throws DomainError unless mu ∈ (0,1) and c > 0 (both finite).
  void validate() const;

  double a() const { return c * mu; }
  double b() const { return c * (1.0 - mu); }

  friend bool operator==(const PopulationState&, const PopulationState&) = default;
};

struct GroupLabel {
  int id = 0;
  std::string name;

  friend bool operator==(const GroupLabel&, const GroupLabel&) = default;
};

/// Clamps a mean into [kMeanFloor, 1 − kMeanFloor].
double clamp_mean(double mu);

struct HistogramBin {
  double center = 0.0;
  double weight = 0.0;
};

/// Method-of-moments Beta fit: mu is the weighted mean, c = mu(1−mu)/var − 1
/// (at least kMinShape). Requires ≥ 3 bins with centers in [0,1] and
/// non-negative weights of positive total. Throws DegenerateError when the
/// variance is 0 or not below mu(1 − mu).
PopulationState fit_beta_from_histogram(std::span<const HistogramBin> bins);

/// Replaces every shape with the arithmetic mean of the shapes.
std::vector<PopulationState> equalize_shapes(std::span<const PopulationState> states);

/// True when all states share the same c exactly.
bool shared_shape(std::span<const PopulationState> states);

}  // namespace fairdyn
