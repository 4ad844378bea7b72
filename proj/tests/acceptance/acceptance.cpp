// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include <fairdyn/fairdyn.hpp>

#include "oracles.hpp"

using namespace fairdyn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome()> check;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

std::string list(const std::vector<double>& v) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << fmt("%.4f", v[i]);
  out << ']';
  return out.str();
}

std::vector<GroupSpec> pair_of(double mu0, double mu1, double c, const DynamicsParams& p0, const DynamicsParams& p1) {
  return {{{0, "group 0"}, {mu0, c}, p0}, {{1, "group 1"}, {mu1, c}, p1}};
}

// ---------------------------------------------------------------------------

Outcome bifurcation_reproduction() {
  const auto t0 = std::chrono::steady_clock::now();
  const DynamicsParams params{0.99, 0.2, 0.0};
  const auto vf = solve_bellman(1.6, params, {0.25, 0.6});
  const auto report = detect_bifurcation(vf, 1.6, params, linspace(0.02, 0.98, 97), 500);
  const double elapsed = seconds_since(t0);

  bool pass = report.limits.size() == 2 && report.boundaries.size() == 1 && elapsed <= 60.0;
  if (pass) {
    pass = std::fabs(report.limits[0] - 0.617) <= 0.01 && std::fabs(report.limits[1] - 0.976) <= 0.01 &&
           std::fabs(report.boundaries[0] - 0.76) <= 0.02;
  }
  const auto best = fixed_point(0.2 / 0.99, 1.6, params, {1e-12, false, 0});
  return {pass, fmt("limits %s, boundaries %s, %.1f s; highest reachable fixed-threshold equilibrium %.4f",
                    list(report.limits).c_str(), list(report.boundaries).c_str(), elapsed, best.mu_inf)};
}

Outcome greedy_exactness() {
  const DynamicsParams params{0.99, 0.2, 0.0};
  double worst = 0.0, spacing = 0.0;
  bool pass = true;
  for (double R : {0.1, 0.25, 1.0, 3.0}) {
    const LenderParams lender{R, 0.0};
    const auto vf = solve_bellman(1.6, params, lender);
    spacing = vf.action_spacing();
    for (double A : vf.policy) {
      const double err = std::fabs(A - greedy_threshold(lender));
      worst = std::max(worst, err);
      if (err > spacing) pass = false;
    }
  }
  return {pass, fmt("max |A* - 1/(1+R)| = %.2e, grid spacing %.2e", worst, spacing)};
}

Outcome social_welfare_peak() {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> nu_d(0.05, 0.5), beta_d(0.55, 1.0), c_d(0.5, 5.0);
  const auto A = linspace(0.0, 1.0, 2001);
  const double spacing = A[1] - A[0];
  double worst = 0.0;
  int done = 0;
  while (done < 10) {
    const double nu = nu_d(rng), beta = beta_d(rng), c = c_d(rng);
    if (nu / beta >= 0.95) continue;
    const auto curve = equilibrium_curve(A, c, {beta, nu, 0.0}, {1e-12, false, 0});
    const auto peak = std::max_element(curve.begin(), curve.end(),
                                       [](const auto& a, const auto& b) { return a.mu_inf < b.mu_inf; });
    worst = std::max(worst, std::fabs(peak->A - nu / beta));
    ++done;
  }
  return {worst <= spacing, fmt("10 random (nu, beta, c): max |argmax - nu/beta| = %.2e, spacing %.2e", worst, spacing)};
}

Outcome uniqueness() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto report = uniqueness_scan(UniquenessGrid::standard());
  const double elapsed = seconds_since(t0);
  return {report.all_unique() && elapsed <= 30.0,
          fmt("%zu cells, %zu boundary cells flagged, %zu interior cells without exactly one sign change, %.2f s",
              report.cells.size(), report.boundary_cells, report.violations.size(), elapsed)};
}

struct RandomScenario {
  double c, beta, nu, mu0, mu1, s, blind_A;
};

RandomScenario draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c_d(1.0, 5.0), beta_d(0.9, 0.99), nu_d(0.1, 0.3), mu_d(0.2, 0.9), s_d(0.3, 0.7),
      u(0.0, 1.0);
  RandomScenario sc{c_d(rng), beta_d(rng), nu_d(rng), mu_d(rng), mu_d(rng), s_d(rng), 0.0};
  sc.blind_A = sc.nu / sc.beta + u(rng) * (0.7 - sc.nu / sc.beta);
  return sc;
}

std::vector<FairPolicy> family_members(const RandomScenario& sc) {
  return {FairPolicy::demographic_parity(sc.s), FairPolicy::equality_of_opportunity(sc.s), blind_threshold(sc.blind_A)};
}

Outcome parity_under_fair_policies() {
  std::mt19937_64 rng(2718);
  double worst = 0.0;
  int runs = 0;
  for (int k = 0; k < 20; ++k) {
    const RandomScenario sc = draw(rng);
    const DynamicsParams p{sc.beta, sc.nu, 0.0};
    const LenderParams lender{std::min(0.25, sc.beta / sc.nu - 1.0), 0.6};
    for (const auto& pol : family_members(sc)) {
      const auto v = fair_constrained_simulation(pair_of(sc.mu0, sc.mu1, sc.c, p, p), pol, lender, 5000);
      worst = std::max(worst, v.gap.final_gap);
      ++runs;
    }
  }
  return {worst < 1e-3, fmt("%d runs (20 scenarios x DP, EO, blind), max final gap %.2e", runs, worst)};
}

bool non_trivial(const Trajectory& traj) {
  for (const auto& g : traj.steps.back().groups) {
    if (g.p_plus < 0.05 || g.p_plus > 0.95) return false;
  }
  return true;
}

Outcome misestimation_dichotomy() {
  std::mt19937_64 rng(1618);
  std::uniform_real_distribution<double> alpha_d(0.0, 0.4), delta_d(0.1, 0.4);
  int equal_runs = 0, unequal_runs = 0, skipped = 0;
  double worst_equal = 0.0, least_unequal = 1.0;
  while (equal_runs < 12 || unequal_runs < 12) {
    const RandomScenario sc = draw(rng);
    const auto members = family_members(sc);
    const FairPolicy& pol = members[static_cast<std::size_t>(equal_runs + unequal_runs) % 3];
    const double a0 = alpha_d(rng);
    const bool equal = equal_runs <= unequal_runs;
    const double a1 = equal ? a0 : a0 + delta_d(rng);
    const auto v = fair_constrained_simulation(
        pair_of(sc.mu0, sc.mu1, sc.c, {sc.beta, sc.nu, a0}, {sc.beta, sc.nu, a1}), pol, {0.25, 0.6}, 5000);
    if (!non_trivial(v.trajectory)) {
      ++skipped;
      continue;
    }
    if (equal) {
      worst_equal = std::max(worst_equal, v.gap.final_gap);
      ++equal_runs;
    } else {
      least_unequal = std::min(least_unequal, v.gap.final_gap);
      ++unequal_runs;
    }
  }
  return {worst_equal < 1e-3 && least_unequal > 1e-3,
          fmt("equal alpha: %d runs, max gap %.2e; unequal alpha: %d runs, min gap %.2e; %d draws with trivial thresholds skipped",
              equal_runs, worst_equal, unequal_runs, least_unequal, skipped)};
}

Outcome policy_lower_bound() {
  const DynamicsParams params{0.99, 0.2, 0.0};
  int solved = 0, failed = 0;
  for (double c : {0.95, 1.6, 3.0}) {
    for (auto lender : {LenderParams{0.25, 0.6}, LenderParams{0.21, 0.97}, LenderParams{1.0, 0.9}, LenderParams{3.95, 0.5}}) {
      const auto vf = solve_bellman(c, params, lender);
      const auto report = lemma1_check(vf, params, lender);
      ++solved;
      if (!report.applicable || !report.passed) ++failed;
    }
  }
  return {failed == 0, fmt("%d solved policies with R <= beta/nu - 1, %d with A*(mu) < nu/beta - spacing", solved, failed)};
}

Outcome special_functions() {
  const std::vector<double> shapes = {0.1, 0.5, 1.0, 2.0, 5.0, 20.0};
  double round_trip = 0.0, moment = 0.0, derivative = 0.0;
  for (double a : shapes) {
    for (double b : shapes) {
      const specfun::BetaParams p{a, b};
      const double mu = a / (a + b), c = a + b;
      for (int k = 1; k <= 99; ++k) {
        const double x = k / 100.0;
        const double lower = specfun::reg_inc_beta(x, p);
        const double back = lower <= 0.5 ? specfun::inv_reg_inc_beta(lower, p)
                                         : specfun::inv_reg_inc_beta_upper(specfun::reg_inc_beta_upper(x, p), p);
        round_trip = std::max(round_trip, std::fabs(back - x));
        moment = std::max(moment, std::fabs(specfun::upper_tail(x, mu, c).moment - oracle::tail_moment(x, mu, c)));
      }
    }
  }
  const double h = 1e-5;
  for (double A : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (double mu : {0.2, 0.5, 0.8}) {
      for (double c : {0.5, 2.0, 10.0}) {
        for (double alpha : {0.1, 0.5, 0.9}) {
          const PopulationState st{mu, c};
          const double fd = (step_mean(A, st, {0.95, 0.25, alpha + h}) - step_mean(A, st, {0.95, 0.25, alpha - h})) / (2 * h);
          derivative = std::max(derivative, std::fabs(misestimation_sensitivity(A, st, {0.95, 0.25, alpha}) - fd));
        }
      }
    }
  }
  return {round_trip <= 1e-10 && moment <= 1e-8 && derivative <= 1e-6,
          fmt("inverse round trip %.1e, truncated moment vs quadrature %.1e, d/dalpha vs finite differences %.1e", round_trip,
              moment, derivative)};
}

Outcome synthetic_data_pattern() {
  std::ostringstream csv;
  write_synthetic_tables(csv, {{"disadvantaged", {0.40, 0.9}}, {"advantaged", {0.70, 1.0}}});
  std::istringstream in(csv.str());
  PipelineOptions opts;
  opts.equalize_shapes = true;
  const auto fitted = pipeline(parse_score_tables(in), opts);
  const PopulationState s0 = fitted.groups[0].state, s1 = fitted.groups[1].state;
  const double c = s0.c;

  const DynamicsParams params{0.99, 0.2, 0.0};
  const LenderParams lender{0.21, 0.97};
  const auto vf = std::make_shared<const ValueFunction>(solve_bellman(c, params, lender));
  const auto groups = pair_of(s0.mu, s1.mu, c, params, params);
  const std::size_t T = 1000;

  const auto optimal = simulate(groups, OptimalPolicy{{vf}}, T, lender);
  const auto dp = simulate(groups, LenderOptimalFairPolicy{FairPolicy::demographic_parity(0.5), vf}, T, lender);
  const auto eo = simulate(groups, LenderOptimalFairPolicy{FairPolicy::equality_of_opportunity(0.5), vf}, T, lender);
  const auto blind = simulate(groups, LenderOptimalFairPolicy{blind_threshold(0.5), vf}, T, lender);

  const auto fo = optimal.final_means();
  const bool optimal_splits = std::fabs(fo[0] - fo[1]) > 0.1;

  const auto fe = eo.final_means();
  const bool eo_positive = parity_gap(eo).final_gap < 1e-3 && fe[0] >= s1.mu && fe[1] >= s1.mu;

  const auto fb = blind.final_means();
  const bool blind_harms = parity_gap(blind).final_gap < 1e-3 && fb[0] < s0.mu && fb[1] < s0.mu;

  const auto adv = dp.means(1);
  const double dip = *std::min_element(adv.begin(), adv.end());
  const auto fd = dp.final_means();
  const bool dp_dips = dip < s1.mu && parity_gap(dp).final_gap < 1e-3 && fd[0] > s1.mu && fd[1] > s1.mu;

  return {optimal_splits && eo_positive && blind_harms && dp_dips,
          fmt("fitted mu (%.3f, %.3f), c %.3f; optimal -> (%.3f, %.3f); EO -> (%.3f, %.3f); blind -> (%.3f, %.3f); "
              "DP advantaged min %.3f then -> (%.3f, %.3f)",
              s0.mu, s1.mu, c, fo[0], fo[1], fe[0], fe[1], fb[0], fb[1], dip, fd[0], fd[1])};
}

Outcome finite_mdp_agreement() {
  const DynamicsParams params{0.99, 0.2, 0.0};
  const LenderParams lender{0.25, 0.6};
  const double c = 1.6;
  BellmanOptions opts;
  opts.grid_size = 64;
  opts.action_grid = 64;
  opts.refine = false;
  const auto vf = solve_bellman(c, params, lender, opts);

  const auto& states = vf.mu_grid;
  const auto A = linspace(0.0, 1.0, 64);
  const std::size_t n = states.size();
  std::vector<double> g(n * A.size());
  std::vector<std::size_t> next(n * A.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double a = c * states[i], b = c * (1.0 - states[i]);
    for (std::size_t j = 0; j < A.size(); ++j) {
      const double p_plus = boost::math::ibetac(a, b, A[j]);
      const double m = states[i] * boost::math::ibetac(a + 1.0, b, A[j]);
      const double f = params.beta * m + params.nu * (1.0 - p_plus);
      g[i * A.size() + j] = (1.0 + lender.R) * m - p_plus;
      std::size_t k = static_cast<std::size_t>(std::lower_bound(states.begin(), states.end(), f) - states.begin());
      if (k == n) k = n - 1;
      if (k > 0 && f - states[k - 1] <= states[k] - f) --k;
      next[i * A.size() + j] = k;
    }
  }
  std::vector<double> J(n, 0.0), Jn(n);
  for (int it = 0; it < 10000; ++it) {
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = -1e300;
      for (std::size_t j = 0; j < A.size(); ++j) best = std::max(best, g[i * A.size() + j] + lender.gamma * J[next[i * A.size() + j]]);
      Jn[i] = best;
      diff = std::max(diff, std::fabs(best - J[i]));
    }
    J.swap(Jn);
    if (diff < 1e-14) break;
  }
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    err = std::max(err, std::fabs(J[i] - vf.values[i]));
    scale = std::max(scale, std::fabs(J[i]));
  }
  return {err / scale <= 0.02, fmt("64 states x 64 actions: sup |J_mdp - J_spline| / sup |J_mdp| = %.4f", err / scale)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "optimal lending bifurcates into clusters near 0.617 and 0.976 with boundary near 0.76", bifurcation_reproduction},
      {2, "zero-discount optimal policy equals 1/(1+R)", greedy_exactness},
      {3, "equilibrium curve peaks at nu/beta", social_welfare_peak},
      {4, "fixed-threshold equilibrium unique on the standard grid", uniqueness},
      {5, "DP, EO and blind policies reach parity", parity_under_fair_policies},
      {6, "equal misestimation keeps parity, unequal misestimation breaks it", misestimation_dichotomy},
      {7, "optimal thresholds never fall below nu/beta", policy_lower_bound},
      {8, "special-function accuracy", special_functions},
      {9, "four-policy pattern on synthetic score data (R = 0.21)", synthetic_data_pattern},
      {10, "spline Bellman solver agrees with a 64x64 finite MDP within 2%", finite_mdp_agreement},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s [%2d] %s (%.1f s) | %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d passed, %d failed\n", criteria.size(), static_cast<int>(criteria.size()) - failures, failures);
  return failures == 0 ? 0 : 1;
}
