#include "fairdyn/population.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairdyn/error.hpp"

namespace fairdyn {

void PopulationState::validate() const {
  if (!(mu > 0.0 && mu < 1.0)) throw DomainError("population mean must lie in (0,1), got " + std::to_string(mu));
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("population shape must be positive, got " + std::to_string(c));
}

double clamp_mean(double mu) { return std::clamp(mu, kMeanFloor, 1.0 - kMeanFloor); }

PopulationState fit_beta_from_histogram(std::span<const HistogramBin> bins) {
  if (bins.size() < 3) throw DomainError("histogram needs at least 3 bins");
  double total = 0.0;
  for (const auto& bin : bins) {
    if (!(bin.center >= 0.0 && bin.center <= 1.0)) throw DomainError("histogram bin center outside [0,1]");
    if (!(bin.weight >= 0.0) || !std::isfinite(bin.weight)) throw DomainError("histogram weight must be non-negative");
    total += bin.weight;
  }
  if (!(total > 0.0)) throw DegenerateError("histogram weights sum to zero");

  double mean = 0.0;
  for (const auto& bin : bins) mean += bin.weight / total * bin.center;
  double var = 0.0;
  for (const auto& bin : bins) {
    const double d = bin.center - mean;
    var += bin.weight / total * d * d;
  }
  const double bound = mean * (1.0 - mean);
  if (!(var > 0.0)) throw DegenerateError("histogram has zero variance");
  if (!(var < bound)) throw DegenerateError("histogram variance too large for a Beta distribution");

  PopulationState out;
  out.mu = clamp_mean(mean);
  out.c = std::max(kMinShape, bound / var - 1.0);
  return out;
}

std::vector<PopulationState> equalize_shapes(std::span<const PopulationState> states) {
  if (states.empty()) throw DomainError("equalize_shapes: empty input");
  double sum = 0.0;
  for (const auto& s : states) {
    s.validate();
    sum += s.c;
  }
  const double c = sum / static_cast<double>(states.size());
  std::vector<PopulationState> out(states.begin(), states.end());
  if (shared_shape(states)) return out;
  for (auto& s : out) s.c = c;
  return out;
}

bool shared_shape(std::span<const PopulationState> states) {
  return std::all_of(states.begin(), states.end(),
                     [&](const PopulationState& s) { return s.c == states.front().c; });
}

}  // namespace fairdyn
