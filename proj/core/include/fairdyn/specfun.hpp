#pragma once

// Special-function kernel: regularized incomplete beta function, its
// inverse, and the mean-parameterized Beta density with its truncated
// moments. All functions are pure and thread-safe.

namespace fairdyn::specfun {

/// Shapes above this are treated as a point mass at the mean by the
/// mean-parameterized helpers below.
inline constexpr double kPointMassShape = 1e4;

/// Standard Beta shapes (a, b), both strictly positive.
struct BetaParams {
  double a = 1.0;
  double b = 1.0;

  /// a = c·mu, b = c·(1 − mu). Throws DomainError unless mu ∈ (0,1), c > 0.
  static BetaParams from_mean(double mu, double c);

  double mean() const { return a / (a + b); }
  double shape() const { return a + b; }
};

/// Throws DomainError unless a > 0 and b > 0 (and both finite).
void validate(const BetaParams& p);

/// log B(a, b), accurate for large shapes.
double log_beta(double a, double b);

/// Regularized incomplete beta function I_x(a, b).
double reg_inc_beta(double x, const BetaParams& p);

/// Upper tail 1 − I_x(a, b), computed without cancellation.
double reg_inc_beta_upper(double x, const BetaParams& p);

/// x^a (1−x)^b / B(a, b); the common prefactor of the incomplete beta
/// expansions and of the recurrence I_x(a+1, b) = I_x(a, b) − prefactor / a.
double beta_power_term(double x, const BetaParams& p);

/// Returns x with I_x(a, b) = q. Monotone non-decreasing in q.
double inv_reg_inc_beta(double q, const BetaParams& p);

/// Returns x with 1 − I_x(a, b) = q. Preferred when q is a small upper-tail
/// probability, where 1 − q would lose precision.
double inv_reg_inc_beta_upper(double q, const BetaParams& p);

/// Density of Beta(c·mu, c·(1−mu)) at x ∈ (0,1).
double beta_pdf(double x, double mu, double c);

/// Mass above the threshold together with the first truncated moment.
struct UpperTail {
  double proportion = 0.0;  ///< p₊ = ∫_A¹ π(x) dx
  double moment = 0.0;      ///< ∫_A¹ x π(x) dx = mu · (1 − I_A(c·mu + 1, c(1−mu)))
};

/// Computes both tail quantities from a single continued-fraction pass.
UpperTail upper_tail(double threshold, double mu, double c);

/// p₊(A, mu) = 1 − I_A(c·mu, c(1−mu)).
double selected_proportion(double threshold, double mu, double c);

/// mu₊(A, mu), the mean among those above the threshold. Throws
/// DegenerateError when p₊ = 0.
double selected_mean(double threshold, double mu, double c);

}  // namespace fairdyn::specfun
