#include "fairdyn/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>

#include "fairdyn/error.hpp"
#include "fairdyn/interp.hpp"
#include "fairdyn/specfun.hpp"

namespace fairdyn {
namespace {

constexpr std::string_view kColumns[] = {"group", "score", "cdf", "delinquency_90d"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t row, std::size_t column) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(column) +
                         " (" + std::string(kColumns[column - 1]) + "): '" + std::string(field) +
                         "' is not a number",
                     row, column);
  }
  return v;
}

std::string where(std::size_t row, std::size_t column) {
  return "row " + std::to_string(row) + ", column " + std::to_string(column) + " (" +
         std::string(kColumns[column - 1]) + ")";
}

std::vector<double> scores_of(const ScoreTable& table) {
  std::vector<double> out;
  for (const auto& r : table.rows) out.push_back(r.score);
  return out;
}

}  // namespace

ScoreTables parse_score_tables(std::istream& in) {
  std::string line;
  std::size_t row = 0;
  bool header = false;
  ScoreTables out;
  std::map<std::string, std::size_t, std::less<>> index;
  std::vector<std::size_t> last_row;

  while (std::getline(in, line)) {
    ++row;
    if (row == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto fields = split(view);
    if (!header) {
      if (fields.size() != 4 || !std::equal(fields.begin(), fields.end(), std::begin(kColumns))) {
        throw ParseError("row " + std::to_string(row) + ": expected header 'group,score,cdf,delinquency_90d'", row, 0);
      }
      header = true;
      continue;
    }
    if (fields.size() != 4) {
      throw ParseError("row " + std::to_string(row) + ": expected 4 fields, found " + std::to_string(fields.size()),
                       row, std::min<std::size_t>(fields.size() + 1, 4));
    }
    if (fields[0].empty()) throw ParseError(where(row, 1) + ": empty group name", row, 1);
    const ScoreRow r{parse_number(fields[1], row, 2), parse_number(fields[2], row, 3),
                     parse_number(fields[3], row, 4)};
    if (r.cdf < 0.0 || r.cdf > 1.0) throw ParseError(where(row, 3) + ": cdf outside [0,1]", row, 3);
    if (r.delinquency < 0.0 || r.delinquency > 1.0) {
      throw ParseError(where(row, 4) + ": delinquency rate outside [0,1]", row, 4);
    }

    auto it = index.find(fields[0]);
    if (it == index.end()) {
      const std::size_t id = out.tables.size();
      it = index.emplace(std::string(fields[0]), id).first;
      out.tables.push_back(ScoreTable{GroupLabel{static_cast<int>(id), std::string(fields[0])}, {}});
      last_row.push_back(0);
    }
    ScoreTable& table = out.tables[it->second];
    if (!table.rows.empty()) {
      const ScoreRow& prev = table.rows.back();
      const std::size_t prev_row = last_row[it->second];
      if (!(r.score > prev.score)) {
        throw ParseError(where(row, 2) + ": score not increasing for group '" + table.group.name +
                             "' (previous row " + std::to_string(prev_row) + ")",
                         row, 2);
      }
      if (r.cdf < prev.cdf) {
        throw ParseError(where(row, 3) + ": cdf decreases for group '" + table.group.name +
                             "' (previous row " + std::to_string(prev_row) + ")",
                         row, 3);
      }
    }
    table.rows.push_back(r);
    last_row[it->second] = row;
  }
  if (!header) throw ParseError("empty input: missing header", 0, 0);
  if (out.tables.empty()) throw ParseError("no data rows", 0, 0);

  for (auto& table : out.tables) {
    const double last = table.rows.back().cdf;
    if (!(last > 0.0)) throw ParseError("group '" + table.group.name + "': cdf is identically zero", 0, 3);
    if (last < 1.0) {
      for (auto& r : table.rows) r.cdf /= last;
      out.warnings.push_back("group '" + table.group.name + "': cdf ends at " + std::to_string(last) +
                             "; rescaled to end at 1");
    }
  }
  return out;
}

ScoreTables load_score_tables(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return parse_score_tables(in);
}

ScoreDensity score_density(const ScoreTable& table, const DensityOptions& options) {
  if (table.rows.size() < 5) throw DegenerateError("group '" + table.group.name + "': need at least 5 rows for a density");
  const std::vector<double> s = scores_of(table);
  std::vector<double> F;
  for (const auto& r : table.rows) F.push_back(r.cdf);
  if (!(F.back() - F.front() > 0.0)) throw DegenerateError("group '" + table.group.name + "': cdf is flat");

  ScoreDensity out;
  const std::size_t sub = std::max<std::size_t>(options.subdivisions, 1);
  std::vector<double> grid;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    for (std::size_t k = 0; k < sub; ++k) grid.push_back(s[i] + (s[i + 1] - s[i]) * static_cast<double>(k) / static_cast<double>(sub));
  }
  grid.push_back(s.back());

  std::vector<double> rho(grid.size());
  if (options.interpolation == CdfInterpolation::Monotone) {
    const MonotoneCubic cdf(s, F);
    for (std::size_t j = 0; j < grid.size(); ++j) rho[j] = cdf.derivative(grid[j]);
  } else {
    const NaturalCubic cdf(s, F);
    for (std::size_t j = 0; j < grid.size(); ++j) rho[j] = cdf.derivative(grid[j]);
  }
  bool clamped = false;
  for (double& v : rho) {
    if (v < 0.0) {
      v = 0.0;
      clamped = true;
    }
  }
  if (clamped) out.warnings.push_back("group '" + table.group.name + "': negative density from interpolation overshoot clamped to 0");

  double area = 0.0;
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) area += 0.5 * (rho[j] + rho[j + 1]) * (grid[j + 1] - grid[j]);
  if (!(area > 0.0)) throw DegenerateError("group '" + table.group.name + "': density vanishes");
  out.points.reserve(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) out.points.push_back({grid[j], rho[j] / area});
  return out;
}

ScoreTable smooth_delinquency(const ScoreTable& table, std::size_t window) {
  if (window <= 1) return table;
  ScoreTable out = table;
  const std::size_t n = table.rows.size();
  const std::size_t half = window / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, lo + window - 1);
    double sum = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) sum += table.rows[k].delinquency;
    out.rows[i].delinquency = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

std::vector<HistogramBin> repayment_histogram(const ScoreTable& table, const ScoreDensity& density,
                                              std::size_t bins) {
  if (bins < 1) throw DomainError("repayment_histogram: need at least one bin");
  if (density.points.size() < 2) throw DomainError("repayment_histogram: density has fewer than two points");
  const std::vector<double> s = scores_of(table);
  std::vector<double> d;
  for (const auto& r : table.rows) d.push_back(r.delinquency);

  std::vector<double> mass(bins, 0.0);
  std::vector<double> moment(bins, 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < density.points.size(); ++j) {
    const auto& p = density.points[j];
    const auto& q = density.points[j + 1];
    const double m = 0.5 * (p.density + q.density) * (q.score - p.score);
    if (m <= 0.0) continue;
    const double mid = 0.5 * (p.score + q.score);
    const double r = std::clamp(1.0 - interp_linear(s, d, mid), 0.0, 1.0);
    const auto k = std::min(bins - 1, static_cast<std::size_t>(r * static_cast<double>(bins)));
    mass[k] += m;
    moment[k] += m * r;
    total += m;
  }
  if (!(total > 0.0)) throw DegenerateError("repayment_histogram: no mass");

  std::vector<HistogramBin> out(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    const double mid = (static_cast<double>(k) + 0.5) / static_cast<double>(bins);
    out[k].center = mass[k] > 0.0 ? moment[k] / mass[k] : mid;
    out[k].weight = mass[k] / total;
  }
  return out;
}

PipelineResult pipeline(const ScoreTables& tables, const PipelineOptions& options) {
  PipelineResult out;
  out.warnings = tables.warnings;
  for (const auto& raw : tables.tables) {
    const ScoreTable table = smooth_delinquency(raw, options.delinquency_window);
    ScoreDensity density = score_density(table, options.density);
    out.warnings.insert(out.warnings.end(), density.warnings.begin(), density.warnings.end());
    FittedGroup g;
    g.label = table.group;
    g.histogram = repayment_histogram(table, density, options.bins);
    if (g.histogram.size() < 3) {
      std::vector<HistogramBin> padded = g.histogram;
      padded.resize(3, HistogramBin{0.5, 0.0});
      g.raw = fit_beta_from_histogram(padded);
    } else {
      g.raw = fit_beta_from_histogram(g.histogram);
    }
    g.state = g.raw;
    out.groups.push_back(std::move(g));
  }
  if (options.equalize_shapes && out.groups.size() > 1) {
    std::vector<PopulationState> states;
    for (const auto& g : out.groups) states.push_back(g.raw);
    const auto eq = equalize_shapes(states);
    for (std::size_t i = 0; i < out.groups.size(); ++i) out.groups[i].state = eq[i];
  }
  return out;
}

PipelineResult pipeline(const std::filesystem::path& path, const PipelineOptions& options) {
  return pipeline(load_score_tables(path), options);
}

void write_synthetic_tables(std::ostream& out, const std::vector<SyntheticGroup>& groups,
                            std::size_t rows) {
  if (rows < 5) throw DomainError("write_synthetic_tables: need at least 5 rows");
  std::ostringstream buf;
  buf.precision(17);
  buf << "group,score,cdf,delinquency_90d\n";
  for (const auto& g : groups) {
    g.state.validate();
    const specfun::BetaParams p = specfun::BetaParams::from_mean(g.state.mu, g.state.c);
    for (std::size_t i = 0; i < rows; ++i) {
      const double x = static_cast<double>(i) / static_cast<double>(rows - 1);
      const double score = 300.0 + 550.0 * x;
      buf << g.name << ',' << score << ',' << specfun::reg_inc_beta(x, p) << ',' << 1.0 - x << '\n';
    }
  }
  out << buf.str();
}

}  // namespace fairdyn
