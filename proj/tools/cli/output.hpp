#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace fairdyn::cli {

/// Columns: t,group,mu,threshold,p_plus,mu_plus,reward.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
/// Columns: mu,J,A_star.
void write_value_function_csv(std::ostream& out, const ValueFunction& vf);
/// Columns: A,mu_inf,stable,boundary,classification (classification empty
/// without two reference means).
void write_equilibrium_csv(std::ostream& out, const std::vector<EquilibriumPoint>& curve);

json to_json(const BifurcationReport& report);
json to_json(const Lemma1Report& report);
json to_json(const std::vector<HistogramBin>& histogram);

/// gnuplot scripts reading the CSV files above.
std::string gnuplot_trajectory(const std::string& csv, const Trajectory& traj);
std::string gnuplot_equilibrium(const std::string& csv);
std::string gnuplot_value_function(const std::string& csv);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& j);

std::string csv_field(const std::string& s);
std::string slug(const std::string& s);

}  // namespace fairdyn::cli
