#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/app.hpp"
#include "cli/config.hpp"

namespace fs = std::filesystem;
using fairdyn::cli::run;
using json = nlohmann::ordered_json;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
  json out_json() const { return json::parse(out); }
  json err_json() const { return json::parse(err.substr(err.rfind('{', err.find("\"error\"")))); }
};

Result cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Result r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (char ch : line) {
      if (ch == '"') {
        quoted = !quoted;
      } else if (ch == ',' && !quoted) {
        fields.push_back(field);
        field.clear();
      } else {
        field += ch;
      }
    }
    fields.push_back(field);
    rows.push_back(fields);
  }
  return rows;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("fairdyn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  json base_config() const {
    return json::parse(R"({
      "groups": [{"name": "group 0", "mu": 0.55, "c": 2}, {"name": "group 1", "mu": 0.75, "c": 2}],
      "dynamics": {"beta": 0.99, "nu": 0.2},
      "lender": {"R": 0.25, "gamma": 0.6},
      "policy": {"type": "fair", "kind": "equality_of_opportunity", "s": 0.5},
      "horizon": 200
    })");
  }

  std::string write_config(json j, const std::string& name = "config.json") {
    j["output"] = {{"dir", (dir_ / "out").string()}};
    const fs::path p = dir_ / name;
    std::ofstream(p) << j.dump(2);
    return p.string();
  }

  fs::path out() const { return dir_ / "out"; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ConfigRoundTripIsIdempotent) {
  for (const auto& entry : fs::directory_iterator(FAIRDYN_SCENARIO_DIR)) {
    const json raw = fairdyn::cli::load_json_file(entry.path().string());
    const json once = fairdyn::cli::to_json(fairdyn::cli::parse_config(raw));
    const json twice = fairdyn::cli::to_json(fairdyn::cli::parse_config(once));
    EXPECT_EQ(once, twice) << entry.path();
  }
}

TEST_F(Cli, PrintConfigAppliesOverrides) {
  const auto cfg = write_config(base_config());
  const auto r = cli({"simulate", "-c", cfg, "--set", "dynamics.beta=0.95", "groups[1].mu=0.6", "--print-config"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = r.out_json();
  EXPECT_EQ(j["dynamics"]["beta"], 0.95);
  EXPECT_EQ(j["groups"][1]["mu"], 0.6);
}

TEST_F(Cli, RejectAllPolicyRevertsToNu) {
  json j = base_config();
  j["policy"] = {{"type", "fixed"}, {"A", 1.0}};
  j["horizon"] = 5;
  const auto r = cli({"simulate", "-c", write_config(j)});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(out() / "trajectory.csv");
  ASSERT_EQ(rows[0], (std::vector<std::string>{"t", "group", "mu", "threshold", "p_plus", "mu_plus", "reward"}));
  ASSERT_EQ(rows.size(), 1u + 6u * 2u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][0] != "0") EXPECT_DOUBLE_EQ(std::stod(rows[i][2]), 0.2);
  }
}

TEST_F(Cli, EqualOpportunityVerdict) {
  const auto r = cli({"simulate", "-c", write_config(base_config())});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = r.out_json();
  EXPECT_EQ(j["command"], "simulate");
  EXPECT_EQ(j["verdict"], "converged");
  EXPECT_LT(j["parity_gap"].get<double>(), 1e-3);
  EXPECT_TRUE(fs::exists(out() / "summary.json"));
  EXPECT_EQ(json::parse(slurp(out() / "summary.json")), j);
}

TEST_F(Cli, OutputsAreDeterministic) {
  const auto cfg = write_config(base_config());
  ASSERT_EQ(cli({"simulate", "-c", cfg}).code, 0);
  const std::string first = slurp(out() / "trajectory.csv");
  ASSERT_EQ(cli({"simulate", "-c", cfg}).code, 0);
  EXPECT_EQ(slurp(out() / "trajectory.csv"), first);
}

TEST_F(Cli, SinglePolicyComparisonMatchesSimulate) {
  json j = base_config();
  const auto sim = cli({"simulate", "-c", write_config(j)});
  ASSERT_EQ(sim.code, 0) << sim.err;
  const std::string expected = slurp(out() / "trajectory.csv");
  j["policies"] = json::array({j["policy"]});
  j.erase("policy");
  const auto cmp = cli({"compare-policies", "-c", write_config(j, "cmp.json"), "-o", (dir_ / "cmp").string()});
  ASSERT_EQ(cmp.code, 0) << cmp.err;
  const json summary = cmp.out_json();
  ASSERT_EQ(summary["policies"].size(), 1u);
  EXPECT_EQ(slurp(summary["policies"][0]["file"].get<std::string>()), expected);
}

TEST_F(Cli, EmptyPolicyListIsValidationError) {
  json j = base_config();
  j.erase("policy");
  j["policies"] = json::array();
  const auto r = cli({"compare-policies", "-c", write_config(j)});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err_json()["error"]["kind"], "validation");
}

TEST_F(Cli, ValidationErrorsNameTheField) {
  json j = base_config();
  j["groups"][1]["c"] = 3.0;
  auto r = cli({"simulate", "-c", write_config(j)});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err_json()["error"]["kind"], "validation");

  j = base_config();
  j["dynamics"]["betta"] = 0.9;
  r = cli({"simulate", "-c", write_config(j)});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err_json()["error"]["field"].get<std::string>().find("betta"), std::string::npos);

  j = base_config();
  j["dynamics"]["nu"] = 1.5;
  r = cli({"simulate", "-c", write_config(j)});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err_json()["error"]["field"], "dynamics.nu");

  r = cli({"simulate", "-c", (dir_ / "missing.json").string()});
  EXPECT_EQ(r.code, 1);
  r = cli({"simulate"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err_json()["error"]["type"], "UsageError");
  r = cli({"frobnicate"});
  EXPECT_EQ(r.code, 1);
}

TEST_F(Cli, NumericalFailureExitsTwo) {
  json j = base_config();
  j["groups"] = json::parse(R"([{"name": "a", "mu": 0.6, "c": 4}, {"name": "b", "mu": 0.8, "c": 4}])");
  j["policy"] = {{"type", "fair"}, {"kind", "equalized_odds"}};
  const auto r = cli({"simulate", "-c", write_config(j)});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err_json()["error"]["kind"], "numerical");
  EXPECT_EQ(r.err_json()["error"]["type"], "DegenerateError");
}

TEST_F(Cli, EquilibriumCurve) {
  json j = base_config();
  const auto r = cli({"equilibrium-curve", "-c", write_config(j), "--steps", "1001", "--gnuplot"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json s = r.out_json();
  EXPECT_NEAR(s["peak"]["A"].get<double>(), 0.2 / 0.99, 1e-3);
  EXPECT_TRUE(fs::exists(out() / "equilibrium.gp"));
  const auto rows = read_csv(out() / "equilibrium.csv");
  ASSERT_EQ(rows.size(), 1002u);
  EXPECT_EQ(rows[0][0], "A");
  EXPECT_NEAR(std::stod(rows.back()[1]), 0.2, 1e-10);
  const std::size_t cls = std::find(rows[0].begin(), rows[0].end(), "classification") - rows[0].begin();
  ASSERT_LT(cls, rows[0].size());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double mu = std::stod(rows[i][1]);
    const std::string expected = mu >= 0.75 ? "positive" : (mu <= 0.55 ? "negative" : "mixed");
    EXPECT_EQ(rows[i][cls], expected) << "row " << i;
  }
}

TEST_F(Cli, OptimalPolicyZeroDiscountIsGreedy) {
  json j = base_config();
  j["lender"]["gamma"] = 0.0;
  j["policy"] = {{"type", "optimal"}};
  const auto r = cli({"optimal-policy", "-c", write_config(j), "--lemma1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json s = r.out_json();
  EXPECT_FALSE(s["bifurcates"].get<bool>());
  EXPECT_TRUE(s["lemma1"]["passed"].get<bool>());
  const auto rows = read_csv(out() / "value_function.csv");
  EXPECT_EQ(rows[0], (std::vector<std::string>{"mu", "J", "A_star"}));
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_NEAR(std::stod(rows[i][2]), 0.8, 1.0 / 256.0);
  EXPECT_TRUE(fs::exists(out() / "bifurcation.json"));
}

TEST_F(Cli, SynthFitRoundTrip) {
  const fs::path csv = dir_ / "scores.csv";
  auto r = cli({"synth", "--group", "low:0.65:2.5", "--group", "high:0.82:3.5", "-o", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  r = cli({"fit", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  json fit = r.out_json();
  ASSERT_EQ(fit["groups"].size(), 2u);
  EXPECT_EQ(fit["groups"][0]["name"], "low");
  EXPECT_NEAR(fit["groups"][0]["mu"].get<double>(), 0.65, 0.01);
  EXPECT_NEAR(fit["groups"][1]["c"].get<double>(), 3.5, 0.35);
  EXPECT_EQ(fit["groups"][0]["histogram"].size(), 100u);

  r = cli({"fit", csv.string(), "--equalize-shapes", "--bins", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  fit = r.out_json();
  const double avg = 0.5 * (fit["groups"][0]["c_unequalized"].get<double>() + fit["groups"][1]["c_unequalized"].get<double>());
  EXPECT_EQ(fit["groups"][0]["c"].get<double>(), avg);
  EXPECT_EQ(fit["groups"][1]["c"].get<double>(), avg);
}

TEST_F(Cli, MalformedScoresReportRow) {
  const fs::path csv = dir_ / "bad.csv";
  std::ofstream(csv) << "group,score,cdf,delinquency_90d\na,1,0.3,0.1\na,2,0.2,0.1\n";
  const auto r = cli({"fit", csv.string()});
  EXPECT_EQ(r.code, 1);
  const json e = r.err_json()["error"];
  EXPECT_EQ(e["type"], "ParseError");
  EXPECT_EQ(e["row"], 3);
  EXPECT_EQ(e["column"], 3);
}

TEST_F(Cli, SweepWritesOneRunPerPoint) {
  json j = base_config();
  j["horizon"] = 20;
  const auto r = cli({"simulate", "-c", write_config(j), "--sweep", "lender.R=0.1,0.3", "groups[0].mu=0.4,0.5,0.6"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json index = json::parse(slurp(out() / "sweep.json"));
  ASSERT_EQ(index["runs"].size(), 6u);
  EXPECT_EQ(index["runs"][1]["set"]["lender.R"], 0.1);
  EXPECT_EQ(index["runs"][1]["set"]["groups[0].mu"], 0.5);
  EXPECT_EQ(index["runs"][3]["set"]["lender.R"], 0.3);
  for (std::size_t k = 0; k < 6; ++k) {
    EXPECT_TRUE(fs::exists(fs::path(index["runs"][k]["output_dir"].get<std::string>()) / "trajectory.csv"));
  }
  const json single = cli({"simulate", "-c", write_config(j), "--set", "lender.R=0.3", "groups[0].mu=0.4", "-o", (dir_ / "one").string()}).out_json();
  EXPECT_EQ(index["runs"][3]["result"]["final_means"], single["final_means"]);
}

TEST_F(Cli, SweepValidatesEveryPointFirst) {
  json j = base_config();
  j["horizon"] = 10;
  const auto r = cli({"simulate", "-c", write_config(j), "--sweep", "groups[1].c=2,3"});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(fs::exists(out() / "sweep.json"));
  EXPECT_FALSE(fs::exists(out() / "sweep_0000"));
}

TEST_F(Cli, SweepReportsWorstExitCode) {
  json j = base_config();
  j["horizon"] = 10;
  j["groups"] = json::parse(R"([{"name": "a", "mu": 0.6, "c": 4}, {"name": "b", "mu": 0.6, "c": 4}])");
  j["policy"] = {{"type", "fair"}, {"kind", "equalized_odds"}};
  const auto r = cli({"simulate", "-c", write_config(j), "--sweep", "groups[1].mu=0.6,0.8"});
  EXPECT_EQ(r.code, 2);
  const json index = json::parse(slurp(out() / "sweep.json"));
  EXPECT_FALSE(index["runs"][0]["result"].contains("error"));
  EXPECT_EQ(index["runs"][1]["result"]["error"]["kind"], "numerical");
}

TEST_F(Cli, Selfcheck) {
  const auto r = cli({"selfcheck"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out_json()["passed"].get<bool>());
}
