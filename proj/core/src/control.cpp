#include "fairdyn/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fairdyn/error.hpp"
#include "fairdyn/parallel.hpp"
#include "fairdyn/roots.hpp"
#include "fairdyn/specfun.hpp"

namespace fairdyn {
namespace {

constexpr double kTieTol = 1e-12;

struct Outcome {
  double g = 0.0;
  double next = 0.0;
};

Outcome evaluate_action(double A, double mu, double c, const DynamicsParams& params,
                        const LenderParams& lender) {
  const PopulationState state{mu, c};
  const StepResult r = step(A, state, params);
  const double g = r.p_plus > 0.0 ? r.p_plus * ((1.0 + lender.R) * r.mu_plus - 1.0) : 0.0;
  return {g, r.next};
}

double tie_tolerance(double best) { return kTieTol * std::max(1.0, std::fabs(best)); }

struct Choice {
  double A = 1.0;
  double value = 0.0;
  std::size_t index = 0;
};

// Largest action whose value is within tolerance of the best.
template <class Q>
Choice scan_actions(std::size_t n, Q&& q, const std::vector<double>& actions) {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = q(k);
    best = std::max(best, v[k]);
  }
  const double cut = best - tie_tolerance(best);
  for (std::size_t k = n; k-- > 0;) {
    if (v[k] >= cut) return {actions[k], v[k], k};
  }
  return {actions.back(), v.back(), n - 1};
}

// Golden-section around the incumbent table maximizer; keeps the table
// choice unless refinement improves on it by more than the tie tolerance.
Choice refine_action(const Choice& incumbent, const std::vector<double>& actions, double mu,
                     double c, const DynamicsParams& params, const LenderParams& lender,
                     const MonotoneCubic& J) {
  const std::size_t k = incumbent.index;
  const double lo = actions[k == 0 ? 0 : k - 1];
  const double hi = actions[std::min(actions.size() - 1, k + 1)];
  auto q = [&](double A) {
    const Outcome o = evaluate_action(A, mu, c, params, lender);
    return o.g + lender.gamma * J(o.next);
  };
  const MaxResult m = golden_section_max(q, lo, hi, 1e-9);
  if (m.fx > incumbent.value + tie_tolerance(incumbent.value)) return {m.x, m.fx, k};
  return incumbent;
}

std::vector<double> uniform(std::size_t n, double lo, double hi) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::size_t iteration_cap(const LenderParams& lender, double tol) {
  if (lender.gamma <= 0.0) return 50;
  const double range = std::max(1.0, lender.R) / (1.0 - lender.gamma);
  const double n = std::log(tol / range) / std::log(lender.gamma);
  return static_cast<std::size_t>(std::max(0.0, std::ceil(n))) * 2 + 50;
}

}  // namespace

void LenderParams::validate() const {
  if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("lender.R must be positive, got " + std::to_string(R));
  if (!(gamma >= 0.0 && gamma < 1.0)) throw DomainError("lender.gamma must lie in [0,1), got " + std::to_string(gamma));
}

double reward(double A, const PopulationState& state, const LenderParams& lender) {
  const StepResult r = step(A, state, DynamicsParams{1.0, 0.0, 0.0});
  if (r.p_plus <= 0.0) return 0.0;
  return r.p_plus * ((1.0 + lender.R) * r.mu_plus - 1.0);
}

double greedy_threshold(const LenderParams& lender) {
  if (!(lender.R >= 0.0)) throw DomainError("greedy_threshold: R must be non-negative");
  if (std::isinf(lender.R)) return 0.0;
  return 1.0 / (1.0 + lender.R);
}

double ValueFunction::value(double mu) const { return interpolant_(mu); }

double ValueFunction::policy_at(double mu) const { return interp_linear(mu_grid, policy, mu); }

double ValueFunction::action_spacing() const {
  return 1.0 / static_cast<double>(options.action_grid - 1);
}

void ValueFunction::rebuild() { interpolant_ = MonotoneCubic(mu_grid, values); }

double ValueFunction::action(double mu) const {
  const std::vector<double> actions = uniform(options.action_grid, 0.0, 1.0);
  const double m = clamp_mean(mu);
  auto q = [&](std::size_t k) {
    const Outcome o = evaluate_action(actions[k], m, c, params, lender);
    return o.g + lender.gamma * interpolant_(o.next);
  };
  Choice choice = scan_actions(actions.size(), q, actions);
  if (options.refine) choice = refine_action(choice, actions, m, c, params, lender, interpolant_);
  return choice.A;
}

ValueFunction solve_bellman(double c, const DynamicsParams& params, const LenderParams& lender,
                            const BellmanOptions& options) {
  params.validate();
  lender.validate();
  PopulationState{0.5, c}.validate();
  if (options.grid_size < 64) throw DomainError("solve_bellman: grid_size must be at least 64");
  if (options.action_grid < 3) throw DomainError("solve_bellman: action_grid must be at least 3");
  if (!(options.tol > 0.0)) throw DomainError("solve_bellman: tol must be positive");
  if (!(options.mu_margin > 0.0 && options.mu_margin < 0.5)) throw DomainError("solve_bellman: mu_margin must lie in (0, 0.5)");

  ValueFunction vf;
  vf.c = c;
  vf.params = params;
  vf.lender = lender;
  vf.options = options;
  vf.mu_grid = uniform(options.grid_size, options.mu_margin, 1.0 - options.mu_margin);
  const std::size_t n = vf.mu_grid.size();
  const std::vector<double> actions = uniform(options.action_grid, 0.0, 1.0);
  const std::size_t na = actions.size();

  std::vector<double> table_g(n * na);
  std::vector<double> table_next(n * na);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t k = 0; k < na; ++k) {
      const Outcome o = evaluate_action(actions[k], vf.mu_grid[i], c, params, lender);
      table_g[i * na + k] = o.g;
      table_next[i * na + k] = o.next;
    }
  });

  std::vector<double> J(n, 0.0);
  std::vector<double> Jn(n, 0.0);
  std::vector<double> A(n, 1.0);
  MonotoneCubic interp(vf.mu_grid, J);
  std::vector<MonotoneCubic::Location> where(n * na);
  for (std::size_t idx = 0; idx < n * na; ++idx) where[idx] = interp.locate(table_next[idx]);

  const std::size_t cap = options.max_iterations > 0 ? options.max_iterations : iteration_cap(lender, options.tol);
  const double gamma = lender.gamma;

  auto sweep = [&](bool refine) {
    interp = MonotoneCubic(vf.mu_grid, J);
    parallel_for(n, [&](std::size_t i) {
      auto q = [&](std::size_t k) {
        return table_g[i * na + k] + gamma * interp.evaluate(where[i * na + k]);
      };
      Choice choice = scan_actions(na, q, actions);
      if (refine) choice = refine_action(choice, actions, vf.mu_grid[i], c, params, lender, interp);
      Jn[i] = choice.value;
      A[i] = choice.A;
    });
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::fabs(Jn[i] - J[i]));
    std::swap(J, Jn);
    vf.residual_history.push_back(res);
    ++vf.iterations;
    return res;
  };

  double res = std::numeric_limits<double>::infinity();
  while (res > options.tol) {
    if (vf.iterations >= cap) throw ConvergenceError("solve_bellman: iteration cap reached in table phase");
    res = sweep(false);
  }
  vf.table_iterations = vf.iterations;
  if (options.refine) {
    const std::size_t refine_cap = vf.iterations + cap;
    do {
      if (vf.iterations >= refine_cap) throw ConvergenceError("solve_bellman: iteration cap reached in refinement phase");
      res = sweep(true);
    } while (res > options.tol);
  }

  vf.values = J;
  vf.policy = A;
  vf.converged = true;
  vf.residual = res;
  vf.rebuild();
  return vf;
}

double limit_mean(const ValueFunction& vf, double mu0, double c, const DynamicsParams& params,
                  std::size_t T) {
  double mu = clamp_mean(mu0);
  for (std::size_t t = 0; t < T; ++t) mu = clamp_mean(step_mean(vf.policy_at(mu), {mu, c}, params));
  return mu;
}

namespace {

template <class Limit>
BifurcationReport analyse_basins(std::span<const double> mu0_grid, const Limit& limit,
                                 const BifurcationOptions& options) {
  BifurcationReport report;
  std::vector<double> mu0(mu0_grid.begin(), mu0_grid.end());
  std::sort(mu0.begin(), mu0.end());
  mu0.erase(std::unique(mu0.begin(), mu0.end()), mu0.end());
  if (mu0.empty()) return report;

  std::vector<double> lim(mu0.size());
  parallel_for(mu0.size(), [&](std::size_t j) { lim[j] = limit(mu0[j]); });
  for (std::size_t j = 0; j < mu0.size(); ++j) report.samples.emplace_back(mu0[j], lim[j]);

  std::vector<double> sorted = lim;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> sum{sorted.front()};
  std::vector<std::size_t> count{1};
  for (std::size_t j = 1; j < sorted.size(); ++j) {
    if (sorted[j] - sorted[j - 1] > options.cluster_gap) {
      sum.push_back(0.0);
      count.push_back(0);
    }
    sum.back() += sorted[j];
    ++count.back();
  }
  for (std::size_t k = 0; k < sum.size(); ++k) report.limits.push_back(sum[k] / static_cast<double>(count[k]));

  auto cluster_of = [&](double value) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < report.limits.size(); ++k) {
      if (std::fabs(value - report.limits[k]) < std::fabs(value - report.limits[best])) best = k;
    }
    return best;
  };

  std::vector<std::size_t> id(mu0.size());
  for (std::size_t j = 0; j < mu0.size(); ++j) id[j] = cluster_of(lim[j]);

  Basin current{mu0[0], mu0[0], report.limits[id[0]], 1};
  for (std::size_t j = 1; j < mu0.size(); ++j) {
    if (id[j] == id[j - 1]) {
      current.mu0_hi = mu0[j];
      ++current.samples;
      continue;
    }
    report.basins.push_back(current);
    double lo = mu0[j - 1];
    double hi = mu0[j];
    while (hi - lo > options.boundary_tol) {
      const double mid = 0.5 * (lo + hi);
      if (cluster_of(limit(mid)) == id[j - 1]) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    report.boundaries.push_back(0.5 * (lo + hi));
    current = Basin{mu0[j], mu0[j], report.limits[id[j]], 1};
  }
  report.basins.push_back(current);
  return report;
}

}  // namespace

BifurcationReport detect_bifurcation(const ValueFunction& vf, double c, const DynamicsParams& params,
                                     std::span<const double> mu0_grid, std::size_t T,
                                     const BifurcationOptions& options) {
  if (!vf.converged) throw DomainError("detect_bifurcation: value function not solved");
  return analyse_basins(mu0_grid, [&](double mu0) { return limit_mean(vf, mu0, c, params, T); }, options);
}

BifurcationReport detect_bifurcation_fixed(double A, double c, const DynamicsParams& params,
                                           std::span<const double> mu0_grid, std::size_t T,
                                           const BifurcationOptions& options) {
  auto limit = [&](double mu0) {
    double mu = clamp_mean(mu0);
    for (std::size_t t = 0; t < T; ++t) mu = clamp_mean(step_mean(A, {mu, c}, params));
    return mu;
  };
  return analyse_basins(mu0_grid, limit, options);
}

Lemma1Report lemma1_check(const ValueFunction& vf, const DynamicsParams& params,
                          const LenderParams& lender) {
  Lemma1Report report;
  report.bound = params.beta > 0.0 ? params.nu / params.beta : 1.0;
  report.spacing = vf.action_spacing();
  const double limit = params.nu > 0.0 ? params.beta / params.nu - 1.0 : std::numeric_limits<double>::infinity();
  report.applicable = lender.R <= limit * (1.0 + 1e-12);
  if (!report.applicable) {
    report.note = "R = " + std::to_string(lender.R) + " exceeds beta/nu - 1 = " + std::to_string(limit) +
                  "; check skipped";
    return report;
  }
  for (std::size_t i = 0; i < vf.mu_grid.size(); ++i) {
    if (vf.policy[i] < report.bound - report.spacing) report.violations.emplace_back(vf.mu_grid[i], vf.policy[i]);
  }
  report.passed = report.violations.empty();
  return report;
}

}  // namespace fairdyn
