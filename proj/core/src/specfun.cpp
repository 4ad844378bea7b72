#include "fairdyn/specfun.hpp"

#include <algorithm>
#include <math.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fairdyn/error.hpp"

namespace fairdyn::specfun {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr double kStirlingMin = 10.0;

// std::lgamma writes the global signgam on glibc; the reentrant variant keeps
// the kernel free of shared state.
double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

// lgamma(x) minus its Stirling main part, valid for x >= 10 to ~1e-16.
double stirling_correction(double x) {
  const double r = 1.0 / x;
  const double r2 = r * r;
  return r * (1.0 / 12.0 -
              r2 * (1.0 / 360.0 -
                    r2 * (1.0 / 1260.0 -
                          r2 * (1.0 / 1680.0 - r2 * (1.0 / 1188.0 - r2 * (691.0 / 360360.0))))));
}

// lgamma(x) - lgamma(x + d) for x >= 10, without the cancellation of two
// large lgamma values.
double lgamma_difference(double x, double d) {
  const double s = x + d;
  return -(x - 0.5) * std::log1p(d / x) - d * std::log(s) + d + stirling_correction(x) -
         stirling_correction(s);
}

struct IncBeta {
  double lower;
  double upper;
};

// log(x^a y^b / B(a,b)) with y = 1 - x supplied by the caller.
double log_power_term(double x, double y, double a, double b) {
  if (a >= kStirlingMin && b >= kStirlingMin) {
    const double s = a + b;
    // a log(x s / a) + b log(y s / b) + 0.5 log(ab / (2 pi s)) - corrections
    const double tx = a * std::log1p((x * s - a) / a);
    const double ty = b * std::log1p((y * s - b) / b);
    return tx + ty + 0.5 * std::log(a * b / (2.0 * std::numbers::pi * s)) -
           stirling_correction(a) - stirling_correction(b) + stirling_correction(s);
  }
  return a * std::log(x) + b * std::log(y) - log_beta(a, b);
}

// Continued fraction for I_x(a,b) (modified Lentz). Converges rapidly for
// x < (a+1)/(a+b+2).
double beta_continued_fraction(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  const int max_iter = 1000 + static_cast<int>(40.0 * std::sqrt(qab));
  for (int m = 1; m <= max_iter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) return h;
  }
  throw ConvergenceError("incomplete beta continued fraction did not converge for a=" +
                         std::to_string(a) + ", b=" + std::to_string(b) +
                         ", x=" + std::to_string(x));
}

IncBeta inc_beta(double x, double y, double a, double b) {
  if (x <= 0.0) return {0.0, 1.0};
  if (y <= 0.0) return {1.0, 0.0};
  const double front = std::exp(log_power_term(x, y, a, b));
  if (front == 0.0) {
    // Both tails of the expansion vanish; decide by the side of the mean.
    return x * (a + b) < a ? IncBeta{0.0, 1.0} : IncBeta{1.0, 0.0};
  }
  if (x * (a + b + 2.0) < a + 1.0) {
    const double lower = front * beta_continued_fraction(x, a, b) / a;
    return {lower, 1.0 - lower};
  }
  const double upper = front * beta_continued_fraction(y, b, a) / b;
  return {1.0 - upper, upper};
}

void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0,1], got " + std::to_string(x));
  }
}

void check_mean_shape(double mu, double c) {
  if (!(mu > 0.0 && mu < 1.0)) {
    throw DomainError("mean must lie in (0,1), got " + std::to_string(mu));
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw DomainError("shape must be positive and finite, got " + std::to_string(c));
  }
}

// NR-style starting point for I_x(a,b) = q.
double initial_guess(double q, double a, double b) {
  if (a >= 1.0 && b >= 1.0) {
    const double pp = q < 0.5 ? q : 1.0 - q;
    const double t = std::sqrt(-2.0 * std::log(pp));
    double x = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
    if (q < 0.5) x = -x;
    const double al = (x * x - 3.0) / 6.0;
    const double h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
    const double w = x * std::sqrt(al + h) / h -
                     (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) *
                         (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
    return a / (a + b * std::exp(2.0 * w));
  }
  const double lna = std::log(a / (a + b));
  const double lnb = std::log(b / (a + b));
  const double t = std::exp(a * lna) / a;
  const double u = std::exp(b * lnb) / b;
  const double w = t + u;
  if (q < t / w) return std::pow(a * w * q, 1.0 / a);
  return 1.0 - std::pow(b * w * (1.0 - q), 1.0 / b);
}

// Finds x in (0, 0.5] with L_x(a,b) = target (or U_x(a,b) = target when
// `upper`). The caller guarantees the root lies at or below one half, so x is
// always the small coordinate and keeps full relative precision. Safeguarded
// Halley/Newton on a shrinking bracket with (geometric) bisection fallback.
double solve_small_root(double target, bool upper, double a, double b) {
  double lo = 0.0;
  double hi = 0.5;
  double x = initial_guess(upper ? 1.0 - target : target, a, b);
  if (!(x > 0.0 && x < hi) || !std::isfinite(x)) x = 0.25;

  for (int iter = 0; iter < 400; ++iter) {
    const double y = 1.0 - x;
    const IncBeta ib = inc_beta(x, y, a, b);
    // Increasing in x in both formulations.
    const double err = upper ? target - ib.upper : ib.lower - target;
    if (err == 0.0) return x;
    if (err < 0.0) {
      lo = x;
    } else {
      hi = x;
    }

    double next = std::numeric_limits<double>::quiet_NaN();
    const double log_pdf = log_power_term(x, y, a, b) - std::log(x) - std::log(y);
    if (log_pdf > -700.0) {
      const double pdf = std::exp(log_pdf);
      double step = err / pdf;
      const double curv = step * ((a - 1.0) / x - (b - 1.0) / y);
      if (std::isfinite(curv)) step /= 1.0 - 0.5 * std::min(1.0, std::max(-1.0, curv));
      next = x - step;
    }
    if (!(next > lo && next < hi)) {
      if (lo == 0.0) {
        next = hi * 0.01;
      } else if (hi > 8.0 * lo) {
        next = std::sqrt(lo * hi);
      } else {
        next = 0.5 * (lo + hi);
      }
    }
    if (std::fabs(next - x) <= 2.0 * kEps * next || hi - lo <= 2.0 * kEps * hi) return next;
    x = next;
  }
  throw ConvergenceError("inverse incomplete beta failed to converge for target=" +
                         std::to_string(target) + ", a=" + std::to_string(a) +
                         ", b=" + std::to_string(b));
}

// Inverts the lower tail (or the upper tail when `upper`), mirroring through
// x -> 1 - x whenever the root lies above one half.
double invert(double target, bool upper, double a, double b) {
  const IncBeta half = inc_beta(0.5, 0.5, a, b);
  const bool root_below_half = upper ? target >= half.upper : target <= half.lower;
  if (root_below_half) return solve_small_root(target, upper, a, b);
  // L_x(a,b) = U_{1-x}(b,a) and U_x(a,b) = L_{1-x}(b,a)
  return 1.0 - solve_small_root(target, !upper, b, a);
}

}  // namespace

BetaParams BetaParams::from_mean(double mu, double c) {
  check_mean_shape(mu, c);
  return {c * mu, c * (1.0 - mu)};
}

void validate(const BetaParams& p) {
  if (!(p.a > 0.0) || !(p.b > 0.0) || !std::isfinite(p.a) || !std::isfinite(p.b)) {
    throw DomainError("beta shapes must be positive and finite, got a=" + std::to_string(p.a) +
                      ", b=" + std::to_string(p.b));
  }
}

double log_beta(double a, double b) {
  if (a > b) std::swap(a, b);
  if (a >= kStirlingMin) {
    const double s = a + b;
    return (a - 0.5) * std::log(a / s) + (b - 0.5) * std::log(b / s) - 0.5 * std::log(s) +
           0.5 * std::log(2.0 * std::numbers::pi) + stirling_correction(a) +
           stirling_correction(b) - stirling_correction(s);
  }
  if (b >= kStirlingMin) return log_gamma(a) + lgamma_difference(b, a);
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double reg_inc_beta(double x, const BetaParams& p) {
  check_unit(x, "x");
  validate(p);
  return inc_beta(x, 1.0 - x, p.a, p.b).lower;
}

double reg_inc_beta_upper(double x, const BetaParams& p) {
  check_unit(x, "x");
  validate(p);
  return inc_beta(x, 1.0 - x, p.a, p.b).upper;
}

double beta_power_term(double x, const BetaParams& p) {
  check_unit(x, "x");
  validate(p);
  if (x == 0.0 || x == 1.0) return 0.0;
  return std::exp(log_power_term(x, 1.0 - x, p.a, p.b));
}

double inv_reg_inc_beta(double q, const BetaParams& p) {
  check_unit(q, "q");
  validate(p);
  if (q == 0.0) return 0.0;
  if (q == 1.0) return 1.0;
  return invert(q, false, p.a, p.b);
}

double inv_reg_inc_beta_upper(double q, const BetaParams& p) {
  check_unit(q, "q");
  validate(p);
  if (q == 0.0) return 1.0;
  if (q == 1.0) return 0.0;
  return invert(q, true, p.a, p.b);
}

double beta_pdf(double x, double mu, double c) {
  check_unit(x, "x");
  const BetaParams p = BetaParams::from_mean(mu, c);
  if (x == 0.0) {
    if (p.a < 1.0) return std::numeric_limits<double>::infinity();
    return p.a == 1.0 ? std::exp(-log_beta(p.a, p.b)) : 0.0;
  }
  if (x == 1.0) {
    if (p.b < 1.0) return std::numeric_limits<double>::infinity();
    return p.b == 1.0 ? std::exp(-log_beta(p.a, p.b)) : 0.0;
  }
  const double y = 1.0 - x;
  return std::exp(log_power_term(x, y, p.a, p.b) - std::log(x) - std::log(y));
}

UpperTail upper_tail(double threshold, double mu, double c) {
  check_unit(threshold, "threshold");
  check_mean_shape(mu, c);
  if (c > kPointMassShape) {
    const double mass = threshold < mu ? 1.0 : 0.0;
    return {mass, mass * mu};
  }
  const double a = c * mu;
  const double b = c * (1.0 - mu);
  if (threshold == 0.0) return {1.0, mu};
  if (threshold == 1.0) return {0.0, 0.0};
  const double y = 1.0 - threshold;
  const IncBeta ib = inc_beta(threshold, y, a, b);
  const double power = std::exp(log_power_term(threshold, y, a, b));
  // 1 - I_A(a+1, b) = 1 - I_A(a, b) + A^a (1-A)^b / (a B(a,b))
  const double shifted_upper = std::min(1.0, ib.upper + power / a);
  return {ib.upper, mu * shifted_upper};
}

double selected_proportion(double threshold, double mu, double c) {
  return upper_tail(threshold, mu, c).proportion;
}

double selected_mean(double threshold, double mu, double c) {
  const UpperTail tail = upper_tail(threshold, mu, c);
  if (tail.proportion <= 0.0) {
    throw DegenerateError("no mass above threshold " + std::to_string(threshold) +
                          "; selected mean undefined");
  }
  const double m = tail.moment / tail.proportion;
  return std::clamp(m, std::max(mu, threshold), 1.0);
}

}  // namespace fairdyn::specfun
