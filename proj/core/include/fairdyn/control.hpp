#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairdyn/dynamics.hpp"
#include "fairdyn/interp.hpp"

namespace fairdyn {

/// Interest R earned on repaid loans and discount factor gamma ∈ [0,1).
struct LenderParams {
  double R = 0.25;
  double gamma = 0.6;

  void validate() const;

  friend bool operator==(const LenderParams&, const LenderParams&) = default;
};

/// Expected one-step lender profit g = p₊·((1 + R)·μ₊ − 1); zero when p₊ = 0.
double reward(double A, const PopulationState& state, const LenderParams& lender);

/// 1/(1 + R) for R ≥ 0.
double greedy_threshold(const LenderParams& lender);

struct BellmanOptions {
  std::size_t grid_size = 513;
  double tol = 1e-9;
  /// Coarse action mesh over [0,1] scanned before golden-section refinement.
  std::size_t action_grid = 257;
  bool refine = true;
  /// Mesh covers [margin, 1 − margin].
  double mu_margin = 1e-4;
  /// Zero derives the cap from the contraction rate.
  std::size_t max_iterations = 0;
};

class ValueFunction {
 public:
  std::vector<double> mu_grid;
  std::vector<double> values;
  std::vector<double> policy;
  bool converged = false;
  double residual = 0.0;
  std::size_t iterations = 0;
  /// Sweeps spent on the coarse action table before refinement started.
  std::size_t table_iterations = 0;
  std::vector<double> residual_history;

  double c = 1.0;
  DynamicsParams params;
  LenderParams lender;
  BellmanOptions options;

  /// Monotone cubic interpolation of J*.
  double value(double mu) const;
  /// Linear interpolation of A* between mesh nodes.
  double policy_at(double mu) const;
  /// Maximizer of g(A, μ) + γ·Ĵ(f(A, μ)) recomputed at an arbitrary μ.
  double action(double mu) const;
  /// Spacing of the coarse action mesh.
  double action_spacing() const;

  /// Rebuilds the interpolant after the public vectors change.
  void rebuild();

 private:
  MonotoneCubic interpolant_;
};

/// Value iteration J_{k+1}(μ) = max_A g(A, μ) + γ·Ĵ_k(f(A, μ)) on a uniform μ
/// mesh with a monotone cubic Ĵ. Ties between actions go to the largest A.
/// Throws ConvergenceError if the iteration cap is hit.
ValueFunction solve_bellman(double c, const DynamicsParams& params, const LenderParams& lender,
                            const BellmanOptions& options = {});

struct Basin {
  double mu0_lo = 0.0;
  double mu0_hi = 0.0;
  double limit = 0.0;
  std::size_t samples = 0;
};

struct BifurcationReport {
  /// Distinct limit means (cluster centres), ascending.
  std::vector<double> limits;
  /// Maximal runs of consecutive initial means sharing a limit.
  std::vector<Basin> basins;
  /// Initial means separating adjacent basins, refined by bisection.
  std::vector<double> boundaries;
  std::vector<std::pair<double, double>> samples;

  bool bifurcates() const { return limits.size() > 1; }
};

struct BifurcationOptions {
  double cluster_gap = 1e-3;
  double boundary_tol = 1e-5;
};

/// Final mean after T steps of the policy extracted from vf.
double limit_mean(const ValueFunction& vf, double mu0, double c, const DynamicsParams& params,
                  std::size_t T);

BifurcationReport detect_bifurcation(const ValueFunction& vf, double c, const DynamicsParams& params,
                                     std::span<const double> mu0_grid, std::size_t T,
                                     const BifurcationOptions& options = {});

/// Same analysis for a constant threshold.
BifurcationReport detect_bifurcation_fixed(double A, double c, const DynamicsParams& params,
                                           std::span<const double> mu0_grid, std::size_t T,
                                           const BifurcationOptions& options = {});

struct Lemma1Report {
  /// R ≤ β/ν − 1; otherwise the check is skipped.
  bool applicable = false;
  bool passed = true;
  double bound = 0.0;
  double spacing = 0.0;
  std::vector<std::pair<double, double>> violations;
  std::string note;
};

/// Checks A*(μ) ≥ ν/β − spacing at every mesh node.
Lemma1Report lemma1_check(const ValueFunction& vf, const DynamicsParams& params,
                          const LenderParams& lender);

}  // namespace fairdyn
