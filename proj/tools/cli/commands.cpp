#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "output.hpp"

namespace fairdyn::cli {
namespace fs = std::filesystem;

std::shared_ptr<const ValueFunction> ValueFunctionCache::get(double c, double alpha) {
  const auto key = std::make_pair(c, alpha);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  auto vf = std::make_shared<const ValueFunction>(
      solve_bellman(c, {config_.beta, config_.nu, alpha}, config_.lender(), config_.bellman()));
  cache_.emplace(key, vf);
  return vf;
}

Policy build_policy(const PolicyConfig& p, const ScenarioConfig& cfg, ValueFunctionCache& cache) {
  switch (p.type) {
    case PolicyType::Fixed:
      return FixedPolicy{*p.A};
    case PolicyType::Greedy:
      return FixedPolicy{greedy_threshold(cfg.lender())};
    case PolicyType::Optimal: {
      OptimalPolicy out;
      for (const auto& g : cfg.groups) out.value_functions.push_back(cache.get(g.c, g.alpha));
      return out;
    }
    case PolicyType::Fair:
      break;
  }

  FairPolicy family;
  switch (p.kind) {
    case PolicyKind::Blind:
      family = blind_threshold(p.A.value_or(0.5));
      break;
    case PolicyKind::DemographicParity:
      family = FairPolicy::demographic_parity(p.s.value_or(0.5));
      break;
    case PolicyKind::EqualityOfOpportunity:
      family = FairPolicy::equality_of_opportunity(p.s.value_or(0.5));
      break;
    case PolicyKind::Custom:
      family = FairPolicy::custom(p.s.value_or(0.5), *p.k1, *p.k2);
      break;
    case PolicyKind::EqualizedOdds: {
      double s = p.s.value_or(0.0);
      if (!p.s) {
        const auto& a = cfg.groups[0];
        const auto& b = cfg.groups[1];
        const auto solution = equalized_odds_intersection({a.mu, a.c}, {b.mu, b.c});
        if (!solution) throw DegenerateError("equalized odds: no non-trivial rate equalizes both error rates");
        s = solution->s_tpr;
      }
      family = FairPolicy::equalized_odds(s);
      break;
    }
  }
  if (p.rate == RateMode::LenderOptimal) {
    return LenderOptimalFairPolicy{family, cache.get(cfg.groups[0].c, cfg.groups[0].alpha)};
  }
  return family;
}

namespace {

json trajectory_summary(const Trajectory& traj, const PolicyConfig& policy, const ScenarioConfig& cfg) {
  json j;
  j["policy"] = policy.display_name();
  j["horizon"] = traj.steps.empty() ? 0 : traj.steps.back().t;
  j["groups"] = json::array();
  std::vector<double> initial;
  for (std::size_t g = 0; g < traj.group_count(); ++g) {
    const auto mu = traj.means(g);
    initial.push_back(mu.front());
    const auto [lo, hi] = std::minmax_element(mu.begin(), mu.end());
    double discounted = 0.0;
    double weight = 1.0;
    for (const auto& step : traj.steps) {
      discounted += weight * step.groups[g].reward;
      weight *= cfg.gamma;
    }
    j["groups"].push_back({{"name", traj.labels[g].name},
                           {"initial_mu", mu.front()},
                           {"final_mu", mu.back()},
                           {"min_mu", *lo},
                           {"max_mu", *hi},
                           {"dipped_below_initial", *lo < mu.front()},
                           {"discounted_reward", discounted}});
  }
  j["final_means"] = traj.final_means();
  if (traj.group_count() == 2) {
    const ParityGap gap = parity_gap(traj);
    j["parity_gap"] = gap.final_gap;
    const bool converged = gap.final_gap < kParityTolerance;
    bool within = true;
    for (std::size_t g = 0; g < 2; ++g) {
      const auto& p = traj.params[g];
      if (p.nu > 0.0 && cfg.R > p.beta / p.nu - 1.0) within = false;
    }
    std::string verdict = converged ? "converged" : "not converged";
    if (policy.type == PolicyType::Fair && !within) verdict += " (informational)";
    j["verdict"] = verdict;
    const auto finals = traj.final_means();
    json cls = json::array();
    for (double m : finals) {
      EquilibriumPoint eq;
      eq.mu_inf = m;
      cls.push_back(std::string(to_string(classify(eq, initial[0], initial[1]))));
    }
    j["final_classification"] = cls;
  }
  return j;
}

void warn(std::ostream& log, const std::string& msg) { log << "warning: " << msg << '\n'; }

}  // namespace

json cmd_simulate(const ScenarioConfig& cfg, std::ostream& log) {
  ValueFunctionCache cache(cfg);
  const Policy policy = build_policy(cfg.policy, cfg, cache);
  const auto groups = cfg.group_specs();
  const Trajectory traj = simulate(groups, policy, cfg.horizon, cfg.lender());

  const fs::path dir = cfg.output.dir;
  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  write_text(dir / "trajectory.csv", csv.str());

  json summary = {{"command", "simulate"}};
  summary.update(trajectory_summary(traj, cfg.policy, cfg));
  summary["files"] = {{"trajectory", (dir / "trajectory.csv").string()}, {"summary", (dir / "summary.json").string()}};
  if (cfg.output.gnuplot) {
    write_text(dir / "trajectory.gp", gnuplot_trajectory("trajectory.csv", traj));
    summary["files"]["gnuplot"] = (dir / "trajectory.gp").string();
  }
  if (summary.contains("verdict") && summary["verdict"].get<std::string>().find("informational") != std::string::npos) {
    warn(log, "lender.R exceeds beta/nu - 1; parity verdict is informational");
  }
  write_json(dir / "summary.json", summary);
  return summary;
}

json cmd_equilibrium_curve(const ScenarioConfig& cfg, std::ostream& log) {
  const auto& g0 = cfg.groups[0];
  const DynamicsParams params = cfg.dynamics_for(0);
  std::vector<double> grid(cfg.A_steps);
  for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = static_cast<double>(k) / static_cast<double>(grid.size() - 1);
  auto curve = equilibrium_curve(grid, g0.c, params);

  const bool bands = cfg.groups.size() >= 2;
  if (bands) {
    for (auto& p : curve) p.classification = classify(p, cfg.groups[0].mu, cfg.groups[1].mu);
  }

  const fs::path dir = cfg.output.dir;
  std::ostringstream csv;
  write_equilibrium_csv(csv, curve);
  write_text(dir / "equilibrium.csv", csv.str());

  json summary;
  summary["command"] = "equilibrium-curve";
  const auto peak = std::max_element(curve.begin(), curve.end(),
                                     [](const auto& a, const auto& b) { return a.mu_inf < b.mu_inf; });
  summary["peak"] = {{"A", peak->A}, {"mu_inf", peak->mu_inf}};
  if (params.beta > 0.0 && params.alpha < 1.0) {
    summary["social_welfare_threshold"] = social_welfare_threshold(params, g0.mu);
  }
  std::size_t multiple = 0;
  for (const auto& p : curve) multiple += p.multiple_roots() ? 1 : 0;
  summary["multiple_root_thresholds"] = multiple;
  if (multiple > 0) warn(log, std::to_string(multiple) + " thresholds show more than one sign change of f(A,mu)-mu");
  if (bands) {
    json list = json::array();
    std::size_t start = 0;
    for (std::size_t k = 1; k <= curve.size(); ++k) {
      if (k == curve.size() || *curve[k].classification != *curve[start].classification) {
        list.push_back({{"classification", std::string(to_string(*curve[start].classification))},
                        {"A_from", curve[start].A},
                        {"A_to", curve[k - 1].A}});
        start = k;
      }
    }
    summary["reference_means"] = {cfg.groups[0].mu, cfg.groups[1].mu};
    summary["bands"] = list;
  }
  summary["files"] = {{"equilibrium", (dir / "equilibrium.csv").string()}};
  if (cfg.output.gnuplot) {
    write_text(dir / "equilibrium.gp", gnuplot_equilibrium("equilibrium.csv"));
    summary["files"]["gnuplot"] = (dir / "equilibrium.gp").string();
  }
  write_json(dir / "equilibrium.json", summary);
  return summary;
}

json cmd_optimal_policy(const ScenarioConfig& cfg, bool lemma1, std::ostream& log) {
  const auto& g0 = cfg.groups[0];
  const DynamicsParams params = cfg.dynamics_for(0);
  const ValueFunction vf = solve_bellman(g0.c, params, cfg.lender(), cfg.bellman());

  const std::size_t n = cfg.bifurcation.mu0_steps;
  std::vector<double> mu0(n);
  for (std::size_t k = 0; k < n; ++k) mu0[k] = 0.02 + 0.96 * static_cast<double>(k) / static_cast<double>(n - 1);
  const BifurcationReport report = detect_bifurcation(vf, g0.c, params, mu0, cfg.bifurcation.horizon);

  const fs::path dir = cfg.output.dir;
  std::ostringstream csv;
  write_value_function_csv(csv, vf);
  write_text(dir / "value_function.csv", csv.str());

  json bif = to_json(report);
  bif["solver"] = {{"iterations", vf.iterations}, {"residual", vf.residual}, {"converged", vf.converged},
                   {"grid_size", vf.mu_grid.size()}, {"action_grid", vf.options.action_grid}};
  if (lemma1) {
    const Lemma1Report check = lemma1_check(vf, params, cfg.lender());
    if (!check.applicable) warn(log, check.note);
    bif["lemma1"] = to_json(check);
  }
  write_json(dir / "bifurcation.json", bif);

  json summary;
  summary["command"] = "optimal-policy";
  summary["solver"] = bif["solver"];
  summary["limits"] = report.limits;
  summary["boundaries"] = report.boundaries;
  summary["bifurcates"] = report.bifurcates();
  if (lemma1) summary["lemma1"] = bif["lemma1"];
  summary["files"] = {{"value_function", (dir / "value_function.csv").string()},
                      {"bifurcation", (dir / "bifurcation.json").string()}};
  if (cfg.output.gnuplot) {
    write_text(dir / "value_function.gp", gnuplot_value_function("value_function.csv"));
    summary["files"]["gnuplot"] = (dir / "value_function.gp").string();
  }
  return summary;
}

json cmd_compare_policies(const ScenarioConfig& cfg, std::ostream& log) {
  if (cfg.policies.empty()) throw ConfigError("policies", "at least one policy is required");
  ValueFunctionCache cache(cfg);
  const auto groups = cfg.group_specs();
  const fs::path dir = cfg.output.dir;

  json summary;
  summary["command"] = "compare-policies";
  summary["policies"] = json::array();
  for (std::size_t i = 0; i < cfg.policies.size(); ++i) {
    const PolicyConfig& pc = cfg.policies[i];
    const Trajectory traj = simulate(groups, build_policy(pc, cfg, cache), cfg.horizon, cfg.lender());
    const std::string base = "trajectory_" + std::to_string(i) + "_" + slug(pc.display_name());
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    write_text(dir / (base + ".csv"), csv.str());
    json entry = trajectory_summary(traj, pc, cfg);
    entry["file"] = (dir / (base + ".csv")).string();
    if (cfg.output.gnuplot) {
      write_text(dir / (base + ".gp"), gnuplot_trajectory(base + ".csv", traj));
      entry["gnuplot"] = (dir / (base + ".gp")).string();
    }
    if (entry.contains("verdict") && entry["verdict"].get<std::string>().find("informational") != std::string::npos) {
      warn(log, pc.display_name() + ": parity verdict is informational (R above beta/nu - 1)");
    }
    summary["policies"].push_back(entry);
  }
  write_json(dir / "comparison.json", summary);
  summary["files"] = {{"comparison", (dir / "comparison.json").string()}};
  return summary;
}

json cmd_fit(const std::string& data_path, const FitOptions& options, std::ostream& log) {
  const PipelineResult result = pipeline(fs::path(data_path), options.pipeline);
  json j;
  j["groups"] = json::array();
  for (const auto& g : result.groups) {
    j["groups"].push_back({{"name", g.label.name},
                           {"mu", g.state.mu},
                           {"c", g.state.c},
                           {"c_unequalized", g.raw.c},
                           {"histogram", to_json(g.histogram)}});
  }
  j["warnings"] = result.warnings;
  for (const auto& w : result.warnings) warn(log, w);
  return j;
}

json cmd_selfcheck(std::ostream& log) {
  const std::vector<double> shapes = {0.1, 0.5, 1.0, 2.0, 5.0, 20.0};
  double round_trip = 0.0;
  double symmetry = 0.0;
  double moment = 0.0;
  bool monotone = true;
  for (double a : shapes) {
    for (double b : shapes) {
      const specfun::BetaParams p{a, b};
      double prev = 0.0;
      for (int k = 1; k <= 99; ++k) {
        const double x = k / 100.0;
        const double lower = specfun::reg_inc_beta(x, p);
        const double upper = specfun::reg_inc_beta_upper(x, p);
        const double back = lower <= 0.5 ? specfun::inv_reg_inc_beta(lower, p) : specfun::inv_reg_inc_beta_upper(upper, p);
        round_trip = std::max(round_trip, std::fabs(back - x));
        symmetry = std::max(symmetry, std::fabs(lower - specfun::reg_inc_beta_upper(1.0 - x, {b, a})));
        if (lower < prev) monotone = false;
        prev = lower;
        const double mu = a / (a + b);
        const auto tail = specfun::upper_tail(x, mu, a + b);
        const double direct = mu * specfun::reg_inc_beta_upper(x, {a + 1.0, b});
        moment = std::max(moment, std::fabs(tail.moment - direct));
      }
    }
  }
  double sensitivity = 0.0;
  for (double A : {0.2, 0.4, 0.6, 0.8}) {
    for (double mu : {0.2, 0.5, 0.8}) {
      for (double alpha : {0.1, 0.5, 0.9}) {
        const PopulationState st{mu, 3.0};
        const double h = 1e-5;
        const double fd = (step_mean(A, st, {0.9, 0.2, alpha + h}) - step_mean(A, st, {0.9, 0.2, alpha - h})) / (2 * h);
        sensitivity = std::max(sensitivity, std::fabs(fd - misestimation_sensitivity(A, st, {0.9, 0.2, alpha})));
      }
    }
  }
  const bool specfun_ok = round_trip <= 1e-10 && symmetry <= 1e-12 && moment <= 1e-12 && monotone && sensitivity <= 1e-6;

  const UniquenessReport scan = uniqueness_scan(UniquenessGrid::standard());
  for (const auto& v : scan.violations) {
    warn(log, "uniqueness: " + std::to_string(v.sign_changes) + " sign changes at A=" + std::to_string(v.A) +
                  " beta=" + std::to_string(v.beta) + " nu=" + std::to_string(v.nu) + " c=" + std::to_string(v.c));
  }

  json j;
  j["command"] = "selfcheck";
  j["specfun"] = {{"round_trip_max_error", round_trip},
                  {"symmetry_max_error", symmetry},
                  {"moment_identity_max_error", moment},
                  {"monotone", monotone},
                  {"misestimation_derivative_max_error", sensitivity},
                  {"passed", specfun_ok}};
  j["uniqueness"] = {{"cells", scan.cells.size()},
                     {"boundary_cells", scan.boundary_cells},
                     {"violations", scan.violations.size()},
                     {"passed", scan.all_unique()}};
  j["passed"] = specfun_ok && scan.all_unique();
  return j;
}

}  // namespace fairdyn::cli
