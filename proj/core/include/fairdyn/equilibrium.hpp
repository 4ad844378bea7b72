#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fairdyn/dynamics.hpp"

namespace fairdyn {

enum class Classification { Positive, Negative, Mixed };

std::string_view to_string(Classification c);

struct EquilibriumPoint {
  double A = 0.0;
  double mu_inf = 0.0;
  bool stable = false;
  /// Root sits at (or within the bracket margin of) 0 or 1.
  bool boundary = false;
  /// Sign changes of f(A, μ) − μ seen by the verification scan; −1 if skipped.
  int scan_roots = -1;
  std::optional<Classification> classification;

  bool multiple_roots() const { return scan_roots > 1; }
};

struct FixedPointOptions {
  double xtol = 1e-12;
  /// Dense-mesh sign-change count used to surface non-unique roots.
  bool verify_unique = true;
  int scan_points = 1000;
};

/// Root of f(A, μ) − μ on (0, 1) for a fixed threshold, by Brent's method on
/// a bracket just inside the unit interval.
EquilibriumPoint fixed_point(double A, double c, const DynamicsParams& params,
                             const FixedPointOptions& options = {});

/// Fixed points for every threshold of the grid (computed in parallel).
std::vector<EquilibriumPoint> equilibrium_curve(std::span<const double> A_grid, double c,
                                                const DynamicsParams& params,
                                                const FixedPointOptions& options = {});

/// Positive if μ∞ ≥ both initial means, Negative if μ∞ ≤ both, Mixed otherwise.
Classification classify(const EquilibriumPoint& eq, double mu0_i, double mu0_j);

/// Threshold maximizing the one-step mean: ν/β at α = 0, and
/// (ν − αβμ)/(β(1 − α)) otherwise, clamped to [0,1]. Throws DegenerateError at
/// α = 1 and DomainError at β = 0.
double social_welfare_threshold(const DynamicsParams& params, double mu);

struct UniquenessCell {
  double A = 0.0;
  double beta = 0.0;
  double nu = 0.0;
  double c = 0.0;
  int sign_changes = 0;
  /// f − μ is not strictly positive at the left end of the mesh or not
  /// strictly negative at the right end, so the root may sit on the boundary.
  bool boundary = false;
};

struct UniquenessReport {
  std::vector<UniquenessCell> cells;
  std::size_t boundary_cells = 0;
  /// Interior cells whose sign-change count differs from one.
  std::vector<UniquenessCell> violations;

  bool all_unique() const { return violations.empty(); }
};

struct UniquenessGrid {
  std::vector<double> A;
  std::vector<double> beta;
  std::vector<double> nu;
  std::vector<double> c;
  int mesh_points = 1000;
  double margin = 1e-6;

  /// A, β, ν ∈ {0, 0.1, …, 1}; c ∈ {0.5, 1, 2, 5, 20, 100}.
  static UniquenessGrid standard();
};

/// Counts sign changes of f(A, μ) − μ (α = 0) over a dense μ mesh for every
/// grid cell.
UniquenessReport uniqueness_scan(const UniquenessGrid& grid);

}  // namespace fairdyn
