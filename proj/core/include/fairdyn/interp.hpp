#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fairdyn {

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch–Carlson
/// slopes). Monotone data give a monotone interpolant and no interval
/// overshoots the range of its endpoint values.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;

  /// `x` must be strictly increasing with at least two nodes.
  MonotoneCubic(std::span<const double> x, std::span<const double> y);

  /// Evaluates the interpolant; arguments outside the node range are clamped.
  double operator()(double x) const;

  /// First derivative of the interpolant (zero outside the node range).
  double derivative(double x) const;

  /// Interval index and local coordinate of a (clamped) argument. Locations
  /// depend only on the nodes, so they can be reused across interpolants that
  /// share them.
  struct Location {
    std::size_t interval = 0;
    double t = 0.0;
  };
  Location locate(double x) const;
  double evaluate(const Location& loc) const;

  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& values() const { return y_; }

 private:
  std::size_t interval(double x) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> slope_;
};

/// Natural cubic spline. May overshoot; kept for comparison with the
/// monotone interpolant in the score-density pipeline.
class NaturalCubic {
 public:
  NaturalCubic() = default;
  NaturalCubic(std::span<const double> x, std::span<const double> y);

  double operator()(double x) const;
  double derivative(double x) const;

 private:
  std::size_t interval(double x) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> second_;
};

/// Piecewise-linear interpolation on a strictly increasing grid, clamped at
/// the ends.
double interp_linear(std::span<const double> x, std::span<const double> y, double at);

}  // namespace fairdyn
