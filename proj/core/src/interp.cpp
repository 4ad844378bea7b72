#include "fairdyn/interp.hpp"

#include <algorithm>
#include <cmath>

#include "fairdyn/error.hpp"

namespace fairdyn {
namespace {

void check_nodes(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("interpolation: node/value size mismatch");
  if (x.size() < 2) throw DomainError("interpolation: need at least two nodes");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw DomainError("interpolation: nodes must be strictly increasing");
  }
}

std::size_t find_interval(const std::vector<double>& x, double at) {
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  const auto idx = static_cast<std::size_t>(std::distance(x.begin(), it));
  return std::clamp<std::size_t>(idx == 0 ? 0 : idx - 1, 0, x.size() - 2);
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), slope_(x.size(), 0.0) {
  check_nodes(x, y);
  const std::size_t n = x_.size();
  std::vector<double> h(n - 1);
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  if (n == 2) {
    slope_[0] = slope_[1] = delta[0];
    return;
  }
  // Interior: weighted harmonic mean, zero at local extrema.
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      slope_[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      slope_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  // One-sided three-point ends, limited to preserve shape.
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (d * d0 <= 0.0) {
      d = 0.0;
    } else if (d0 * d1 <= 0.0 && std::fabs(d) > std::fabs(3.0 * d0)) {
      d = 3.0 * d0;
    }
    return d;
  };
  slope_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  slope_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

std::size_t MonotoneCubic::interval(double x) const { return find_interval(x_, x); }

double MonotoneCubic::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  return evaluate(locate(x));
}

MonotoneCubic::Location MonotoneCubic::locate(double x) const {
  if (x <= x_.front()) return {0, 0.0};
  if (x >= x_.back()) return {x_.size() - 2, 1.0};
  const std::size_t i = interval(x);
  return {i, (x - x_[i]) / (x_[i + 1] - x_[i])};
}

double MonotoneCubic::evaluate(const Location& loc) const {
  const std::size_t i = loc.interval;
  const double h = x_[i + 1] - x_[i];
  const double t = loc.t;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2.0 * t3 - 3.0 * t2 + 1.0) * y_[i] + (t3 - 2.0 * t2 + t) * h * slope_[i] +
         (-2.0 * t3 + 3.0 * t2) * y_[i + 1] + (t3 - t2) * h * slope_[i + 1];
}

double MonotoneCubic::derivative(double x) const {
  if (x < x_.front() || x > x_.back()) return 0.0;
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t;
  return (6.0 * t2 - 6.0 * t) * (y_[i] - y_[i + 1]) / h + (3.0 * t2 - 4.0 * t + 1.0) * slope_[i] +
         (3.0 * t2 - 2.0 * t) * slope_[i + 1];
}

NaturalCubic::NaturalCubic(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), second_(x.size(), 0.0) {
  check_nodes(x, y);
  const std::size_t n = x_.size();
  if (n < 3) return;
  // Tridiagonal solve for interior second derivatives.
  std::vector<double> u(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double sig = (x_[i] - x_[i - 1]) / (x_[i + 1] - x_[i - 1]);
    const double p = sig * second_[i - 1] + 2.0;
    second_[i] = (sig - 1.0) / p;
    const double dd = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]) -
                      (y_[i] - y_[i - 1]) / (x_[i] - x_[i - 1]);
    u[i] = (6.0 * dd / (x_[i + 1] - x_[i - 1]) - sig * u[i - 1]) / p;
  }
  second_[n - 1] = 0.0;
  for (std::size_t k = n - 1; k-- > 0;) second_[k] = second_[k] * second_[k + 1] + u[k];
}

std::size_t NaturalCubic::interval(double x) const { return find_interval(x_, x); }

double NaturalCubic::operator()(double x) const {
  x = std::clamp(x, x_.front(), x_.back());
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = (x - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * second_[i] + (b * b * b - b) * second_[i + 1]) * h * h / 6.0;
}

double NaturalCubic::derivative(double x) const {
  if (x < x_.front() || x > x_.back()) return 0.0;
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = (x - x_[i]) / h;
  return (y_[i + 1] - y_[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * second_[i] +
         (3.0 * b * b - 1.0) / 6.0 * h * second_[i + 1];
}

double interp_linear(std::span<const double> x, std::span<const double> y, double at) {
  if (x.empty() || x.size() != y.size()) throw DomainError("interp_linear: bad grid");
  if (at <= x.front()) return y.front();
  if (at >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  const auto i = static_cast<std::size_t>(std::distance(x.begin(), it)) - 1;
  const double t = (at - x[i]) / (x[i + 1] - x[i]);
  return y[i] + t * (y[i + 1] - y[i]);
}

}  // namespace fairdyn
