#include "app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <exception>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "commands.hpp"
#include "output.hpp"

namespace fairdyn::cli {
namespace {

struct Failure {
  int code = kNumerical;
  json body;
};

Failure describe_failure(std::exception_ptr ep) {
  json e;
  int code = kNumerical;
  try {
    std::rethrow_exception(ep);
  } catch (const ConfigError& ex) {
    code = kValidation;
    e = {{"kind", "validation"}, {"type", "ConfigError"}, {"message", ex.what()}};
    if (!ex.field().empty()) e["field"] = ex.field();
  } catch (const ParseError& ex) {
    code = kValidation;
    e = {{"kind", "validation"}, {"type", "ParseError"}, {"message", ex.what()}};
    if (ex.row() > 0) e["row"] = ex.row();
    if (ex.column() > 0) e["column"] = ex.column();
  } catch (const ShapeMismatchError& ex) {
    code = kValidation;
    e = {{"kind", "validation"}, {"type", "ShapeMismatchError"}, {"message", ex.what()}};
  } catch (const DomainError& ex) {
    code = kValidation;
    e = {{"kind", "validation"}, {"type", "DomainError"}, {"message", ex.what()}};
  } catch (const CLI::ParseError& ex) {
    code = kValidation;
    e = {{"kind", "validation"}, {"type", "UsageError"}, {"message", ex.what()}};
  } catch (const ConvergenceError& ex) {
    e = {{"kind", "numerical"}, {"type", "ConvergenceError"}, {"message", ex.what()}};
  } catch (const DegenerateError& ex) {
    e = {{"kind", "numerical"}, {"type", "DegenerateError"}, {"message", ex.what()}};
  } catch (const std::exception& ex) {
    e = {{"kind", "numerical"}, {"type", "Error"}, {"message", ex.what()}};
  } catch (...) {
    e = {{"kind", "numerical"}, {"type", "Error"}, {"message", "unknown failure"}};
  }
  return {code, json{{"error", e}}};
}

struct ScenarioArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::vector<std::string> sweeps;
  std::string output_dir;
  bool gnuplot = false;
  bool print_config = false;
};

void add_scenario_options(CLI::App* cmd, ScenarioArgs& args) {
  cmd->add_option("-c,--config", args.config, "Scenario JSON file")->required();
  cmd->add_option("--set", args.overrides, "Override a config value, e.g. dynamics.beta=0.99")->take_all();
  cmd->add_option("--sweep", args.sweeps, "Sweep a config value over a list, e.g. lender.R=0.1,0.2")->take_all();
  cmd->add_option("-o,--output-dir", args.output_dir, "Directory for output files (overrides output.dir)");
  cmd->add_flag("--gnuplot", args.gnuplot, "Also write gnuplot scripts");
  cmd->add_flag("--print-config", args.print_config, "Print the resolved config and exit");
}

json resolve_json(const ScenarioArgs& args) {
  json j = load_json_file(args.config);
  for (const auto& o : args.overrides) apply_override(j, o);
  if (!args.output_dir.empty()) apply_override(j, "output.dir=" + json(args.output_dir).dump());
  if (args.gnuplot) apply_override(j, "output.gnuplot=true");
  return j;
}

std::vector<std::string> split_values(const std::string& list) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = list.find(',', start);
    out.push_back(list.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// Runs `command` once, or once per point of the sweep grid. Returns the exit code.
template <class Command>
int run_scenario(const ScenarioArgs& args, Command&& command, std::ostream& out, std::ostream& err) {
  const json base = resolve_json(args);
  if (args.sweeps.empty()) {
    const ScenarioConfig cfg = parse_config(base);
    if (args.print_config) {
      out << to_json(cfg).dump(2) << '\n';
      return kSuccess;
    }
    out << command(cfg, err).dump(2) << '\n';
    return kSuccess;
  }

  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  for (const auto& s : args.sweeps) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) throw ConfigError(s, "sweep must look like path=v1,v2,...");
    axes.emplace_back(s.substr(0, eq), split_values(s.substr(eq + 1)));
  }
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.second.size();

  const ScenarioConfig base_cfg = parse_config(base);
  const std::filesystem::path root = base_cfg.output.dir;
  std::vector<ScenarioConfig> configs;
  std::vector<json> assignments;
  for (std::size_t k = 0; k < total; ++k) {
    json j = base;
    json assigned = json::object();
    std::size_t rem = k;
    for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
      const std::string& value = it->second[rem % it->second.size()];
      rem /= it->second.size();
      apply_override(j, it->first + "=" + value);
      json parsed = json::parse(value, nullptr, false);
      assigned[it->first] = parsed.is_discarded() ? json(value) : parsed;
    }
    std::ostringstream name;
    name << "sweep_" << std::setw(4) << std::setfill('0') << k;
    apply_override(j, "output.dir=" + json((root / name.str()).string()).dump());
    configs.push_back(parse_config(j));
    assignments.push_back(assigned);
  }
  if (args.print_config) {
    json list = json::array();
    for (const auto& c : configs) list.push_back(to_json(c));
    out << list.dump(2) << '\n';
    return kSuccess;
  }

  std::vector<json> results(total);
  std::vector<std::string> logs(total);
  std::vector<int> codes(total, kSuccess);
  parallel_for(total, [&](std::size_t k) {
    std::ostringstream log;
    try {
      results[k] = command(configs[k], log);
    } catch (...) {
      const Failure f = describe_failure(std::current_exception());
      codes[k] = f.code;
      results[k] = f.body;
    }
    logs[k] = log.str();
  });

  json index;
  index["runs"] = json::array();
  int code = kSuccess;
  for (std::size_t k = 0; k < total; ++k) {
    err << logs[k];
    index["runs"].push_back({{"index", k}, {"set", assignments[k]}, {"output_dir", configs[k].output.dir}, {"result", results[k]}});
    code = std::max(code, codes[k]);
  }
  write_json(root / "sweep.json", index);
  out << index.dump(2) << '\n';
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  CLI::App app{"fairdyn: long-term population dynamics under fair lending policies"};
  app.name("fairdyn");
  app.require_subcommand(1);

  ScenarioArgs sim_args, eq_args, opt_args, cmp_args;
  std::size_t A_steps = 0;
  bool lemma1 = false;
  auto* sim = app.add_subcommand("simulate", "Evolve the groups under the configured policy");
  add_scenario_options(sim, sim_args);
  auto* eq = app.add_subcommand("equilibrium-curve", "Fixed points of fixed-threshold dynamics over A");
  add_scenario_options(eq, eq_args);
  eq->add_option("--steps", A_steps, "Number of thresholds in [0,1]");
  auto* opt = app.add_subcommand("optimal-policy", "Solve the Bellman equation and detect bifurcations");
  add_scenario_options(opt, opt_args);
  opt->add_flag("--lemma1", lemma1, "Check that optimal thresholds stay above nu/beta");
  auto* cmp = app.add_subcommand("compare-policies", "Simulate every policy in the config's policy list");
  add_scenario_options(cmp, cmp_args);

  std::string data_path;
  std::string fit_output;
  std::string interpolation = "monotone";
  FitOptions fit_options;
  auto* fit = app.add_subcommand("fit", "Fit Beta populations to score/delinquency tables");
  fit->add_option("data", data_path, "CSV with header group,score,cdf,delinquency_90d")->required();
  fit->add_option("--bins", fit_options.pipeline.bins, "Repayment histogram bins")->check(CLI::PositiveNumber);
  fit->add_option("--window", fit_options.pipeline.delinquency_window, "Moving-average window for delinquency rates")
      ->check(CLI::PositiveNumber);
  fit->add_option("--interpolation", interpolation, "CDF interpolant")->check(CLI::IsMember({"monotone", "natural"}));
  fit->add_flag("--equalize-shapes", fit_options.pipeline.equalize_shapes, "Replace every c by the mean shape");
  fit->add_option("-o,--output", fit_output, "Write the JSON here instead of stdout");

  auto* selfcheck = app.add_subcommand("selfcheck", "Uniqueness scan and special-function identity suite");

  std::vector<std::string> synth_groups;
  std::size_t synth_rows = 111;
  std::string synth_output;
  auto* synth = app.add_subcommand("synth", "Write synthetic score tables with known Beta repayment profiles");
  synth->add_option("--group", synth_groups, "name:mu:c (repeatable)")->required()->take_all();
  synth->add_option("--rows", synth_rows, "Scores per group")->check(CLI::Range(5, 100000));
  synth->add_option("-o,--output", synth_output, "Output CSV (default stdout)");

  std::vector<std::string> argv_store = args_in;
  std::vector<const char*> argv;
  argv.push_back("fairdyn");
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kSuccess;
    }

    if (*sim) return run_scenario(sim_args, [](const ScenarioConfig& c, std::ostream& log) { return cmd_simulate(c, log); }, out, err);
    if (*eq) {
      if (A_steps > 0) eq_args.overrides.push_back("equilibrium.A_steps=" + std::to_string(A_steps));
      return run_scenario(eq_args, [](const ScenarioConfig& c, std::ostream& log) { return cmd_equilibrium_curve(c, log); }, out, err);
    }
    if (*opt) {
      return run_scenario(opt_args, [lemma1](const ScenarioConfig& c, std::ostream& log) { return cmd_optimal_policy(c, lemma1, log); },
                          out, err);
    }
    if (*cmp) return run_scenario(cmp_args, [](const ScenarioConfig& c, std::ostream& log) { return cmd_compare_policies(c, log); }, out, err);
    if (*fit) {
      fit_options.pipeline.density.interpolation =
          interpolation == "natural" ? CdfInterpolation::Natural : CdfInterpolation::Monotone;
      const json result = cmd_fit(data_path, fit_options, err);
      if (fit_output.empty()) {
        out << result.dump(2) << '\n';
      } else {
        write_json(fit_output, result);
      }
      return kSuccess;
    }
    if (*selfcheck) {
      const json result = cmd_selfcheck(err);
      out << result.dump(2) << '\n';
      return result["passed"].get<bool>() ? kSuccess : kNumerical;
    }
    if (*synth) {
      std::vector<SyntheticGroup> groups;
      for (const auto& spec : synth_groups) {
        const auto a = spec.find(':');
        const auto b = spec.rfind(':');
        if (a == std::string::npos || a == b) throw ConfigError("--group", "expected name:mu:c, got '" + spec + "'");
        try {
          groups.push_back({spec.substr(0, a), {std::stod(spec.substr(a + 1, b - a - 1)), std::stod(spec.substr(b + 1))}});
        } catch (const std::logic_error&) {
          throw ConfigError("--group", "expected name:mu:c, got '" + spec + "'");
        }
        try {
          groups.back().state.validate();
        } catch (const DomainError& e) {
          throw ConfigError("--group", e.what());
        }
      }
      std::ostringstream csv;
      write_synthetic_tables(csv, groups, synth_rows);
      if (synth_output.empty()) {
        out << csv.str();
      } else {
        write_text(synth_output, csv.str());
      }
      return kSuccess;
    }
    return kValidation;
  } catch (...) {
    const Failure f = describe_failure(std::current_exception());
    err << f.body.dump() << '\n';
    return f.code;
  }
}

}  // namespace fairdyn::cli
