#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace fairdyn::cli {
namespace {

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!keys.count(key)) throw ConfigError(join(path, key), "unknown key");
  }
}

double get_number(const json& j, const std::string& key, const std::string& path, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
  return v.get<double>();
}

std::optional<double> get_optional(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
  return v.get<double>();
}

std::size_t get_count(const json& j, const std::string& key, const std::string& path, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(join(path, key), "expected a non-negative integer");
  return v.get<std::size_t>();
}

std::string get_string(const json& j, const std::string& key, const std::string& path, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
  return v.get<std::string>();
}

bool get_bool(const json& j, const std::string& key, const std::string& path, bool fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) throw ConfigError(join(path, key), "expected true or false");
  return v.get<bool>();
}

const char* type_name(PolicyType t) {
  switch (t) {
    case PolicyType::Optimal: return "optimal";
    case PolicyType::Fixed: return "fixed";
    case PolicyType::Greedy: return "greedy";
    case PolicyType::Fair: return "fair";
  }
  return "optimal";
}

PolicyConfig parse_policy(const json& j, const std::string& path) {
  reject_unknown(j, path, {"type", "label", "kind", "rate", "s", "k1", "k2", "A"});
  PolicyConfig p;
  const std::string type = get_string(j, "type", path, "optimal");
  if (type == "optimal") {
    p.type = PolicyType::Optimal;
  } else if (type == "fixed") {
    p.type = PolicyType::Fixed;
  } else if (type == "greedy") {
    p.type = PolicyType::Greedy;
  } else if (type == "fair") {
    p.type = PolicyType::Fair;
  } else {
    throw ConfigError(join(path, "type"), "unknown policy type '" + type + "' (optimal, fixed, greedy, fair)");
  }
  p.label = get_string(j, "label", path, "");
  if (p.type == PolicyType::Fair) {
    try {
      p.kind = policy_kind_from_string(get_string(j, "kind", path, "demographic_parity"));
    } catch (const DomainError& e) {
      throw ConfigError(join(path, "kind"), e.what());
    }
    const std::string rate = get_string(j, "rate", path, "fixed");
    if (rate == "fixed") {
      p.rate = RateMode::Fixed;
    } else if (rate == "lender_optimal") {
      p.rate = RateMode::LenderOptimal;
    } else {
      throw ConfigError(join(path, "rate"), "expected 'fixed' or 'lender_optimal'");
    }
  } else {
    for (const char* key : {"kind", "rate", "s", "k1", "k2"}) {
      if (j.contains(key)) throw ConfigError(join(path, key), std::string("only valid for fair policies"));
    }
  }
  p.s = get_optional(j, "s", path);
  p.k1 = get_optional(j, "k1", path);
  p.k2 = get_optional(j, "k2", path);
  p.A = get_optional(j, "A", path);
  return p;
}

std::string format_number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

std::string PolicyConfig::display_name() const {
  if (!label.empty()) return label;
  switch (type) {
    case PolicyType::Optimal: return "optimal";
    case PolicyType::Greedy: return "greedy";
    case PolicyType::Fixed: return "fixed(A=" + format_number(A.value_or(0.0)) + ")";
    case PolicyType::Fair: break;
  }
  const std::string kind_name(to_string(kind));
  if (rate == RateMode::LenderOptimal) return kind_name + "(lender_optimal)";
  if (kind == PolicyKind::Blind) return kind_name + "(A=" + format_number(A.value_or(0.0)) + ")";
  if (!s) return kind_name;
  return kind_name + "(s=" + format_number(*s) + ")";
}

DynamicsParams ScenarioConfig::dynamics_for(std::size_t group) const {
  return {beta, nu, groups.at(group).alpha};
}

LenderParams ScenarioConfig::lender() const { return {R, gamma}; }

BellmanOptions ScenarioConfig::bellman() const {
  BellmanOptions o;
  o.grid_size = solver.grid_size;
  o.tol = solver.tol;
  o.action_grid = solver.action_grid;
  return o;
}

std::vector<GroupSpec> ScenarioConfig::group_specs() const {
  std::vector<GroupSpec> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    out.push_back({GroupLabel{static_cast<int>(i), groups[i].name}, {groups[i].mu, groups[i].c}, dynamics_for(i)});
  }
  return out;
}

ScenarioConfig parse_config(const json& j) {
  reject_unknown(j, "", {"groups", "dynamics", "lender", "policy", "policies", "horizon", "solver", "equilibrium",
                         "bifurcation", "output"});
  ScenarioConfig cfg;
  if (!j.contains("groups")) throw ConfigError("groups", "required");
  const json& groups = j.at("groups");
  if (!groups.is_array()) throw ConfigError("groups", "expected an array");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const std::string path = "groups[" + std::to_string(i) + "]";
    reject_unknown(groups[i], path, {"name", "mu", "c", "alpha"});
    GroupConfig g;
    g.name = get_string(groups[i], "name", path, "group " + std::to_string(i));
    if (!groups[i].contains("mu")) throw ConfigError(join(path, "mu"), "required");
    g.mu = get_number(groups[i], "mu", path, 0.5);
    if (!groups[i].contains("c")) throw ConfigError(join(path, "c"), "required");
    g.c = get_number(groups[i], "c", path, 2.0);
    g.alpha = get_number(groups[i], "alpha", path, 0.0);
    cfg.groups.push_back(g);
  }
  if (j.contains("dynamics")) {
    const json& d = j.at("dynamics");
    reject_unknown(d, "dynamics", {"beta", "nu"});
    cfg.beta = get_number(d, "beta", "dynamics", cfg.beta);
    cfg.nu = get_number(d, "nu", "dynamics", cfg.nu);
  }
  if (j.contains("lender")) {
    const json& l = j.at("lender");
    reject_unknown(l, "lender", {"R", "gamma"});
    cfg.R = get_number(l, "R", "lender", cfg.R);
    cfg.gamma = get_number(l, "gamma", "lender", cfg.gamma);
  }
  if (j.contains("policy")) cfg.policy = parse_policy(j.at("policy"), "policy");
  if (j.contains("policies")) {
    const json& list = j.at("policies");
    if (!list.is_array()) throw ConfigError("policies", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      cfg.policies.push_back(parse_policy(list[i], "policies[" + std::to_string(i) + "]"));
    }
  }
  cfg.horizon = get_count(j, "horizon", "", cfg.horizon);
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    reject_unknown(s, "solver", {"grid_size", "tol", "action_grid"});
    cfg.solver.grid_size = get_count(s, "grid_size", "solver", cfg.solver.grid_size);
    cfg.solver.tol = get_number(s, "tol", "solver", cfg.solver.tol);
    cfg.solver.action_grid = get_count(s, "action_grid", "solver", cfg.solver.action_grid);
  }
  if (j.contains("equilibrium")) {
    const json& e = j.at("equilibrium");
    reject_unknown(e, "equilibrium", {"A_steps"});
    cfg.A_steps = get_count(e, "A_steps", "equilibrium", cfg.A_steps);
  }
  if (j.contains("bifurcation")) {
    const json& b = j.at("bifurcation");
    reject_unknown(b, "bifurcation", {"mu0_steps", "horizon"});
    cfg.bifurcation.mu0_steps = get_count(b, "mu0_steps", "bifurcation", cfg.bifurcation.mu0_steps);
    cfg.bifurcation.horizon = get_count(b, "horizon", "bifurcation", cfg.bifurcation.horizon);
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, "output", {"dir", "gnuplot"});
    cfg.output.dir = get_string(o, "dir", "output", cfg.output.dir);
    cfg.output.gnuplot = get_bool(o, "gnuplot", "output", cfg.output.gnuplot);
  }
  validate(cfg);
  return cfg;
}

json to_json(const PolicyConfig& p) {
  json j;
  j["type"] = type_name(p.type);
  if (!p.label.empty()) j["label"] = p.label;
  if (p.type == PolicyType::Fair) {
    j["kind"] = std::string(to_string(p.kind));
    j["rate"] = p.rate == RateMode::Fixed ? "fixed" : "lender_optimal";
  }
  if (p.s) j["s"] = *p.s;
  if (p.k1) j["k1"] = *p.k1;
  if (p.k2) j["k2"] = *p.k2;
  if (p.A) j["A"] = *p.A;
  return j;
}

json to_json(const ScenarioConfig& cfg) {
  json j;
  j["groups"] = json::array();
  for (const auto& g : cfg.groups) {
    j["groups"].push_back({{"name", g.name}, {"mu", g.mu}, {"c", g.c}, {"alpha", g.alpha}});
  }
  j["dynamics"] = {{"beta", cfg.beta}, {"nu", cfg.nu}};
  j["lender"] = {{"R", cfg.R}, {"gamma", cfg.gamma}};
  j["policy"] = to_json(cfg.policy);
  j["policies"] = json::array();
  for (const auto& p : cfg.policies) j["policies"].push_back(to_json(p));
  j["horizon"] = cfg.horizon;
  j["solver"] = {{"grid_size", cfg.solver.grid_size}, {"tol", cfg.solver.tol}, {"action_grid", cfg.solver.action_grid}};
  j["equilibrium"] = {{"A_steps", cfg.A_steps}};
  j["bifurcation"] = {{"mu0_steps", cfg.bifurcation.mu0_steps}, {"horizon", cfg.bifurcation.horizon}};
  j["output"] = {{"dir", cfg.output.dir}, {"gnuplot", cfg.output.gnuplot}};
  return j;
}

void validate(const PolicyConfig& p, const ScenarioConfig& cfg, const std::string& path) {
  auto unit = [&](const std::optional<double>& v, const char* key) {
    if (v && !(*v >= 0.0 && *v <= 1.0)) throw ConfigError(join(path, key), "must lie in [0,1]");
  };
  unit(p.A, "A");
  switch (p.type) {
    case PolicyType::Optimal:
    case PolicyType::Greedy:
      if (p.A) throw ConfigError(join(path, "A"), "only valid for fixed or blind policies");
      return;
    case PolicyType::Fixed:
      if (!p.A) throw ConfigError(join(path, "A"), "required for a fixed policy");
      return;
    case PolicyType::Fair:
      break;
  }

  std::vector<PopulationState> states;
  for (const auto& g : cfg.groups) states.push_back({g.mu, g.c});
  if (!shared_shape(states)) throw ConfigError("groups", "fair policies require all groups to share the shape c");

  const bool custom = p.kind == PolicyKind::Custom;
  if (!custom && (p.k1 || p.k2)) throw ConfigError(join(path, p.k1 ? "k1" : "k2"), "offsets are fixed by the policy kind");
  if (custom && (!p.k1 || !p.k2)) throw ConfigError(join(path, p.k1 ? "k2" : "k1"), "required for a custom policy");
  if (p.kind == PolicyKind::Blind) {
    if (p.s) throw ConfigError(join(path, "s"), "blind policies take a threshold A, not a rate");
    if (p.rate == RateMode::Fixed && !p.A) throw ConfigError(join(path, "A"), "required for a blind policy");
    return;
  }
  if (p.A) throw ConfigError(join(path, "A"), "only valid for fixed or blind policies");
  if (p.rate == RateMode::LenderOptimal) {
    if (p.s) throw ConfigError(join(path, "s"), "the rate is chosen by the lender; remove s");
    if (p.kind == PolicyKind::EqualizedOdds) throw ConfigError(join(path, "rate"), "equalized odds has no free rate");
  } else if (!p.s) {
    if (p.kind != PolicyKind::EqualizedOdds) throw ConfigError(join(path, "s"), "required for a fair policy");
    if (cfg.groups.size() != 2) throw ConfigError(join(path, "kind"), "equalized odds without s needs exactly two groups");
  } else if (!(*p.s > 0.0 && *p.s < 1.0)) {
    throw ConfigError(join(path, "s"), "must lie in (0,1)");
  }
  const double k1 = custom ? *p.k1 : (p.kind == PolicyKind::DemographicParity ? 0.0 : 1.0);
  const double k2 = custom ? *p.k2 : 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!(k1 > -states[i].a())) throw ConfigError(join(path, "k1"), "must exceed -c*mu of group " + std::to_string(i));
    if (!(k2 > -states[i].b())) throw ConfigError(join(path, "k2"), "must exceed -c*(1-mu) of group " + std::to_string(i));
  }
}

void validate(const ScenarioConfig& cfg) {
  if (cfg.groups.empty()) throw ConfigError("groups", "at least one group is required");
  for (std::size_t i = 0; i < cfg.groups.size(); ++i) {
    const std::string path = "groups[" + std::to_string(i) + "]";
    const auto& g = cfg.groups[i];
    if (!(g.mu > 0.0 && g.mu < 1.0)) throw ConfigError(path + ".mu", "must lie in (0,1)");
    if (!(g.c > 0.0) || !std::isfinite(g.c)) throw ConfigError(path + ".c", "must be positive");
    if (!(g.alpha >= 0.0 && g.alpha <= 1.0)) throw ConfigError(path + ".alpha", "must lie in [0,1]");
  }
  if (!(cfg.beta >= 0.0 && cfg.beta <= 1.0)) throw ConfigError("dynamics.beta", "must lie in [0,1]");
  if (!(cfg.nu >= 0.0 && cfg.nu <= 1.0)) throw ConfigError("dynamics.nu", "must lie in [0,1]");
  if (!(cfg.R > 0.0) || !std::isfinite(cfg.R)) throw ConfigError("lender.R", "must be positive");
  if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) throw ConfigError("lender.gamma", "must lie in [0,1)");
  if (cfg.horizon < 1) throw ConfigError("horizon", "must be at least 1");
  if (cfg.solver.grid_size < 64) throw ConfigError("solver.grid_size", "must be at least 64");
  if (cfg.solver.action_grid < 3) throw ConfigError("solver.action_grid", "must be at least 3");
  if (!(cfg.solver.tol > 0.0)) throw ConfigError("solver.tol", "must be positive");
  if (cfg.A_steps < 2) throw ConfigError("equilibrium.A_steps", "must be at least 2");
  if (cfg.bifurcation.mu0_steps < 2) throw ConfigError("bifurcation.mu0_steps", "must be at least 2");
  if (cfg.bifurcation.horizon < 1) throw ConfigError("bifurcation.horizon", "must be at least 1");
  if (cfg.output.dir.empty()) throw ConfigError("output.dir", "must not be empty");
  validate(cfg.policy, cfg, "policy");
  for (std::size_t i = 0; i < cfg.policies.size(); ++i) {
    validate(cfg.policies[i], cfg, "policies[" + std::to_string(i) + "]");
  }
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must look like path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &j;
  std::size_t pos = 0;
  while (pos < path.size()) {
    if (path[pos] == '.') {
      ++pos;
      continue;
    }
    if (path[pos] == '[') {
      const auto close = path.find(']', pos);
      if (close == std::string::npos) throw ConfigError(path, "unterminated index");
      std::size_t index = 0;
      try {
        index = std::stoul(path.substr(pos + 1, close - pos - 1));
      } catch (const std::exception&) {
        throw ConfigError(path, "bad index");
      }
      if (!node->is_array()) throw ConfigError(path, "indexing a non-array");
      if (index >= node->size()) throw ConfigError(path, "index out of range");
      node = &(*node)[index];
      pos = close + 1;
      continue;
    }
    const auto end = path.find_first_of(".[", pos);
    const std::string key = path.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    if (node->is_null()) *node = json::object();
    if (!node->is_object()) throw ConfigError(path, "indexing a non-object");
    node = &(*node)[key];
    pos = end == std::string::npos ? path.size() : end;
  }
  *node = value;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "invalid JSON in '" + path + "': " + e.what());
  }
}

}  // namespace fairdyn::cli
