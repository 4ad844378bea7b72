#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fairdyn/population.hpp"

namespace fairdyn {

struct ScoreRow {
  double score = 0.0;
  double cdf = 0.0;
  double delinquency = 0.0;
};

/// One group's score CDF and 90-day delinquency rate per score.
struct ScoreTable {
  GroupLabel group;
  std::vector<ScoreRow> rows;
};

struct ScoreTables {
  std::vector<ScoreTable> tables;
  std::vector<std::string> warnings;
};

/// Reads the `group,score,cdf,delinquency_90d` CSV. Groups are numbered in
/// order of first appearance. Throws ParseError with the offending row and
/// column on malformed fields, non-increasing scores or a decreasing CDF.
/// A CDF ending below 1 is rescaled to end at 1 with a warning.
ScoreTables parse_score_tables(std::istream& in);
ScoreTables load_score_tables(const std::filesystem::path& path);

enum class CdfInterpolation { Monotone, Natural };

struct DensityOptions {
  /// Evaluation points per table interval.
  std::size_t subdivisions = 16;
  CdfInterpolation interpolation = CdfInterpolation::Monotone;
};

struct DensityPoint {
  double score = 0.0;
  double density = 0.0;
};

struct ScoreDensity {
  std::vector<DensityPoint> points;
  std::vector<std::string> warnings;
};

/// Derivative of an interpolant of the CDF, clamped at zero and normalized
/// so its trapezoid integral is exactly one. Requires at least 5 rows.
ScoreDensity score_density(const ScoreTable& table, const DensityOptions& options = {});

/// Moving average of the delinquency column over `window` rows (1 = off).
ScoreTable smooth_delinquency(const ScoreTable& table, std::size_t window);

/// Distribution of repayment probability 1 − d(s) under the score density:
/// each trapezoid panel's mass goes to the bin of its midpoint repayment.
/// Bins split [0,1] evenly; a bin's centre is the mass-weighted mean
/// repayment it received (its midpoint when empty). Weights sum to one.
std::vector<HistogramBin> repayment_histogram(const ScoreTable& table, const ScoreDensity& density,
                                              std::size_t bins = 100);

struct PipelineOptions {
  std::size_t bins = 100;
  std::size_t delinquency_window = 1;
  DensityOptions density;
  bool equalize_shapes = false;
};

struct FittedGroup {
  GroupLabel label;
  PopulationState state;
  /// Fit before shape equalization.
  PopulationState raw;
  std::vector<HistogramBin> histogram;
};

struct PipelineResult {
  std::vector<FittedGroup> groups;
  std::vector<std::string> warnings;
};

PipelineResult pipeline(const ScoreTables& tables, const PipelineOptions& options = {});
PipelineResult pipeline(const std::filesystem::path& path, const PipelineOptions& options = {});

struct SyntheticGroup {
  std::string name;
  PopulationState state;
};

/// Writes score tables in which the repayment probability of score S is
/// (S − 300)/550 and each group's repayment probability is Beta(μ, c), so
/// the pipeline should recover (μ, c).
void write_synthetic_tables(std::ostream& out, const std::vector<SyntheticGroup>& groups,
                            std::size_t rows = 111);

}  // namespace fairdyn
