#include "output.hpp"

#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>

namespace fairdyn::cli {
namespace {

std::ostringstream number_stream() {
  std::ostringstream s;
  s.precision(12);
  return s;
}

}  // namespace

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string slug(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "policy" : out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  auto s = number_stream();
  s << "t,group,mu,threshold,p_plus,mu_plus,reward\n";
  for (const auto& step : traj.steps) {
    for (std::size_t g = 0; g < step.groups.size(); ++g) {
      const auto& r = step.groups[g];
      s << step.t << ',' << csv_field(traj.labels[g].name) << ',' << r.mu << ',' << r.threshold << ','
        << r.p_plus << ',' << r.mu_plus << ',' << r.reward << '\n';
    }
  }
  out << s.str();
}

void write_value_function_csv(std::ostream& out, const ValueFunction& vf) {
  auto s = number_stream();
  s << "mu,J,A_star\n";
  for (std::size_t i = 0; i < vf.mu_grid.size(); ++i) {
    s << vf.mu_grid[i] << ',' << vf.values[i] << ',' << vf.policy[i] << '\n';
  }
  out << s.str();
}

void write_equilibrium_csv(std::ostream& out, const std::vector<EquilibriumPoint>& curve) {
  auto s = number_stream();
  s << "A,mu_inf,stable,boundary,classification\n";
  for (const auto& p : curve) {
    s << p.A << ',' << p.mu_inf << ',' << (p.stable ? 1 : 0) << ',' << (p.boundary ? 1 : 0) << ',';
    if (p.classification) s << to_string(*p.classification);
    s << '\n';
  }
  out << s.str();
}

json to_json(const BifurcationReport& report) {
  json j;
  j["bifurcates"] = report.bifurcates();
  j["limits"] = report.limits;
  j["boundaries"] = report.boundaries;
  j["basins"] = json::array();
  for (const auto& b : report.basins) {
    j["basins"].push_back({{"mu0_lo", b.mu0_lo}, {"mu0_hi", b.mu0_hi}, {"limit", b.limit}, {"samples", b.samples}});
  }
  j["samples"] = json::array();
  for (const auto& [mu0, lim] : report.samples) j["samples"].push_back({{"mu0", mu0}, {"limit", lim}});
  return j;
}

json to_json(const Lemma1Report& report) {
  json j;
  j["applicable"] = report.applicable;
  j["passed"] = report.passed;
  j["bound"] = report.bound;
  j["spacing"] = report.spacing;
  j["violations"] = json::array();
  for (const auto& [mu, A] : report.violations) j["violations"].push_back({{"mu", mu}, {"A", A}});
  if (!report.note.empty()) j["note"] = report.note;
  return j;
}

json to_json(const std::vector<HistogramBin>& histogram) {
  json j = json::array();
  for (const auto& bin : histogram) j.push_back({{"center", bin.center}, {"weight", bin.weight}});
  return j;
}

std::string gnuplot_trajectory(const std::string& csv, const Trajectory& traj) {
  std::ostringstream s;
  s << "set datafile separator ','\n"
    << "set key outside\n"
    << "set xlabel 't'\n"
    << "set ylabel 'mean repayment probability'\n"
    << "set yrange [0:1]\n"
    << "plot ";
  for (std::size_t g = 0; g < traj.labels.size(); ++g) {
    if (g > 0) s << ", \\\n     ";
    s << "'" << csv << "' using 1:(strcol(2) eq '" << traj.labels[g].name << "' ? $3 : NaN) with lines title '"
      << traj.labels[g].name << "'";
  }
  s << "\n";
  return s.str();
}

std::string gnuplot_equilibrium(const std::string& csv) {
  std::ostringstream s;
  s << "set datafile separator ','\n"
    << "set xlabel 'threshold A'\n"
    << "set ylabel 'equilibrium mean'\n"
    << "set key off\n"
    << "plot '" << csv << "' using 1:2 with lines\n";
  return s.str();
}

std::string gnuplot_value_function(const std::string& csv) {
  std::ostringstream s;
  s << "set datafile separator ','\n"
    << "set xlabel 'mu'\n"
    << "set ylabel 'J'\n"
    << "set y2label 'A*'\n"
    << "set ytics nomirror\n"
    << "set y2tics\n"
    << "plot '" << csv << "' using 1:2 with lines title 'J', \\\n"
    << "     '" << csv << "' using 1:3 axes x1y2 with lines title 'A*'\n";
  return s.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace fairdyn::cli
