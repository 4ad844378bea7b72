#include "fairdyn/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "fairdyn/error.hpp"
#include "fairdyn/parallel.hpp"
#include "fairdyn/roots.hpp"
#include "fairdyn/specfun.hpp"

namespace fairdyn {
namespace {

constexpr double kBracket = 1e-10;

int count_sign_changes(std::span<const double> h) {
  int changes = 0;
  int last = 0;
  for (double v : h) {
    const int s = (v > 0.0) - (v < 0.0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Positive: return "positive";
    case Classification::Negative: return "negative";
    case Classification::Mixed: return "mixed";
  }
  return "mixed";
}

EquilibriumPoint fixed_point(double A, double c, const DynamicsParams& params,
                             const FixedPointOptions& options) {
  params.validate();
  if (!(A >= 0.0 && A <= 1.0)) throw DomainError("fixed_point: threshold must lie in [0,1]");
  const PopulationState probe{0.5, c};
  probe.validate();

  auto h = [&](double mu) { return step_mean(A, {mu, c}, params) - mu; };

  EquilibriumPoint out;
  out.A = A;
  const double lo = kBracket;
  const double hi = 1.0 - kBracket;
  const double hlo = h(lo);
  const double hhi = h(hi);
  if (hlo <= 0.0) {
    out.mu_inf = 0.0;
    out.boundary = true;
    out.stable = hlo < 0.0;
  } else if (hhi >= 0.0) {
    out.mu_inf = 1.0;
    out.boundary = true;
    out.stable = hhi > 0.0;
  } else {
    out.mu_inf = brent(h, lo, hi, hlo, hhi, options.xtol).x;
    const double delta = 1e-7;
    const double left = h(std::max(lo, out.mu_inf - delta));
    const double right = h(std::min(hi, out.mu_inf + delta));
    out.stable = left >= 0.0 && right <= 0.0;
  }

  if (options.verify_unique) {
    const int n = std::max(options.scan_points, 3);
    std::vector<double> values(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const double mu = lo + (hi - lo) * k / (n - 1);
      values[static_cast<std::size_t>(k)] = h(mu);
    }
    out.scan_roots = count_sign_changes(values);
  }
  return out;
}

std::vector<EquilibriumPoint> equilibrium_curve(std::span<const double> A_grid, double c,
                                                const DynamicsParams& params,
                                                const FixedPointOptions& options) {
  for (double A : A_grid) {
    if (!(A >= 0.0 && A <= 1.0)) throw DomainError("equilibrium_curve: thresholds must lie in [0,1]");
  }
  std::vector<EquilibriumPoint> out(A_grid.size());
  parallel_for(A_grid.size(), [&](std::size_t i) { out[i] = fixed_point(A_grid[i], c, params, options); });
  return out;
}

Classification classify(const EquilibriumPoint& eq, double mu0_i, double mu0_j) {
  if (eq.mu_inf >= std::max(mu0_i, mu0_j)) return Classification::Positive;
  if (eq.mu_inf <= std::min(mu0_i, mu0_j)) return Classification::Negative;
  return Classification::Mixed;
}

double social_welfare_threshold(const DynamicsParams& params, double mu) {
  params.validate();
  if (!(params.beta > 0.0)) throw DomainError("social_welfare_threshold: beta must be positive");
  if (params.alpha >= 1.0) throw DegenerateError("social_welfare_threshold: alpha = 1 leaves no beneficial threshold");
  if (params.alpha == 0.0) return std::clamp(params.nu / params.beta, 0.0, 1.0);
  const double a = (params.nu - params.alpha * params.beta * mu) / (params.beta * (1.0 - params.alpha));
  return std::clamp(a, 0.0, 1.0);
}

UniquenessGrid UniquenessGrid::standard() {
  UniquenessGrid g;
  for (int k = 0; k <= 10; ++k) {
    const double v = k / 10.0;
    g.A.push_back(v);
    g.beta.push_back(v);
    g.nu.push_back(v);
  }
  g.c = {0.5, 1.0, 2.0, 5.0, 20.0, 100.0};
  return g;
}

UniquenessReport uniqueness_scan(const UniquenessGrid& grid) {
  const int n = std::max(grid.mesh_points, 3);
  std::vector<double> mesh(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    mesh[static_cast<std::size_t>(k)] = grid.margin + (1.0 - 2.0 * grid.margin) * k / (n - 1);
  }

  // With α = 0, f = β·M + ν·(1 − p₊) where p₊ and the truncated moment M
  // depend only on (A, c, μ).
  struct Tails {
    std::vector<double> p;
    std::vector<double> moment;
  };
  const std::size_t nA = grid.A.size();
  const std::size_t nc = grid.c.size();
  std::vector<Tails> tails(nA * nc);
  parallel_for(nA * nc, [&](std::size_t idx) {
    const double A = grid.A[idx / nc];
    const double c = grid.c[idx % nc];
    Tails t;
    t.p.resize(mesh.size());
    t.moment.resize(mesh.size());
    for (std::size_t k = 0; k < mesh.size(); ++k) {
      const auto tail = specfun::upper_tail(A, mesh[k], c);
      t.p[k] = tail.proportion;
      t.moment[k] = tail.moment;
    }
    tails[idx] = std::move(t);
  });

  UniquenessReport report;
  std::vector<double> h(mesh.size());
  for (std::size_t ia = 0; ia < nA; ++ia) {
    for (double beta : grid.beta) {
      for (double nu : grid.nu) {
        for (std::size_t ic = 0; ic < nc; ++ic) {
          const Tails& t = tails[ia * nc + ic];
          for (std::size_t k = 0; k < mesh.size(); ++k) {
            h[k] = beta * t.moment[k] + nu * (1.0 - t.p[k]) - mesh[k];
          }
          UniquenessCell cell{grid.A[ia], beta, nu, grid.c[ic], count_sign_changes(h), false};
          cell.boundary = !(h.front() > 0.0 && h.back() < 0.0);
          if (cell.boundary) {
            ++report.boundary_cells;
          } else if (cell.sign_changes != 1) {
            report.violations.push_back(cell);
          }
          report.cells.push_back(cell);
        }
      }
    }
  }
  return report;
}

}  // namespace fairdyn
