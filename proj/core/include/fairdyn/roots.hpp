#pragma once

#include <functional>

namespace fairdyn {

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

/// Brent's method on a sign-changing bracket [lo, hi]. Terminates when the
/// bracket is narrower than `xtol` (absolute) or f vanishes exactly.
/// Throws DomainError if f(lo) and f(hi) share a strict sign.
RootResult brent(const std::function<double(double)>& f, double lo, double hi,
                 double xtol = 1e-12, int max_iter = 200);

/// Same as above with f(lo), f(hi) already evaluated.
RootResult brent(const std::function<double(double)>& f, double lo, double hi, double flo,
                 double fhi, double xtol = 1e-12, int max_iter = 200);

/// Plain bisection; used where a guaranteed bracket-halving rate matters
/// more than speed.
RootResult bisect(const std::function<double(double)>& f, double lo, double hi,
                  double xtol = 1e-12, int max_iter = 200);

struct MaxResult {
  double x = 0.0;
  double fx = 0.0;
};

/// Golden-section search for a maximum of f on [lo, hi].
MaxResult golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                             double xtol = 1e-10, int max_iter = 200);

}  // namespace fairdyn
