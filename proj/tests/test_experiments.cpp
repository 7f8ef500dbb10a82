#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rcycles/experiments.hpp"

using namespace rcycles;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rcycles_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string data_rows(const std::string& path) {
  std::ifstream in(path);
  std::string line, out;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') out += line + "\n";
  }
  return out;
}

ExperimentConfig golden_config(const std::string& experiment, const fs::path& out) {
  ExperimentConfig cfg = parse_config(R"({"system": {"preset": "golden", "p": [0.7, 0.3]}, "n": 12, "seed": 42})");
  cfg.experiment = experiment;
  cfg.out_dir = out.string();
  return cfg;
}

}  // namespace

TEST(Config, MalformedJsonReportsLine) {
  try {
    parse_config("{\n  \"system\": \"golden\",\n  \"n\": 12,,\n}");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Config, FieldDiagnostics) {
  auto field_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("none");
  };
  EXPECT_EQ(field_of(R"({"system": "golden", "bogus": 1})"), "bogus");
  EXPECT_EQ(field_of(R"({"n": 3})"), "system");
  EXPECT_EQ(field_of(R"({"system": {"preset": "golden", "p": [0.5]}})"), "system.p");
  EXPECT_EQ(field_of(R"({"system": {"preset": "golden", "p": [0.5, 0.6]}})"), "system.p");
  EXPECT_EQ(field_of(R"({"system": "golden", "n": 0})"), "n");
  EXPECT_EQ(field_of(R"({"system": "golden", "n_list": [4, -1]})"), "n_list[1]");
  EXPECT_EQ(field_of(R"({"system": {"maps": [{"kind": "tent"}]}})"), "system.maps[0].kind");
  EXPECT_EQ(field_of(R"({"system": {"maps": [{"kind": "lsv", "alpha": -1}]}})"), "system.maps[0].alpha");
  EXPECT_EQ(field_of(R"({"system": {"preset": "beta", "beta": 3.0}})"), "system.beta");
  EXPECT_EQ(field_of(R"({"system": "golden", "tolerances": {"ulam": 0}})"), "tolerances.ulam");
  EXPECT_EQ(field_of(R"({"system": "golden"})"), "none");
}

TEST(Config, InlineMapsBuildTheSameSystem) {
  const BuiltSystem a = build_system(nlohmann::json::parse(
      R"({"maps": [{"kind": "beta_greedy", "beta": 1.618033988749895}, {"kind": "beta_lazy", "beta": 1.618033988749895}],
          "p": [0.7, 0.3]})"));
  ASSERT_TRUE(a.beta);
  EXPECT_TRUE(a.golden);
  const BuiltSystem d = build_system(nlohmann::json::parse(
      R"({"maps": [{"kind": "affine_markov", "breakpoints": [0, 0.5, 1], "slopes": [2, 2], "intercepts": [0, -1]}],
          "periodic": true})"));
  EXPECT_TRUE(d.system.identify_endpoints());
  EXPECT_EQ(d.system.size(), 1u);
}

TEST(Run, UnknownExperimentListsNames) {
  ExperimentConfig cfg = golden_config("nope", scratch("unknown"));
  try {
    run_experiment(cfg);
    FAIL();
  } catch (const ConfigError& e) {
    for (const auto& n : experiment_names()) EXPECT_NE(std::string(e.what()).find(n), std::string::npos);
  }
}

TEST(Run, CyclesWritesCsvAndSummary) {
  const fs::path out = scratch("cycles");
  const RunResult r = run_experiment(golden_config("cycles", out));
  EXPECT_EQ(r.status, 0);
  ASSERT_TRUE(fs::exists(out / "cycles_n12_s42.csv"));
  std::ifstream in(out / "summary.json");
  const auto summary = nlohmann::json::parse(in);
  const auto& row = summary["results"][0];
  EXPECT_GT(row["z"].get<double>(), 0.0);
  EXPECT_NEAR(row["pressure"].get<double>(), std::log(row["z"].get<double>()) / 12.0, 1e-12);
  std::ifstream csv(out / "cycles_n12_s42.csv");
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line.rfind("# rcycles ", 0), 0u);
  std::getline(csv, line);
  EXPECT_EQ(line.rfind("# config_hash ", 0), 0u);
  std::getline(csv, line);
  EXPECT_EQ(line, "# seed 42");
  std::getline(csv, line);
  std::getline(csv, line);
  EXPECT_EQ(line, "word,x,log_weight,orbit,digits");
}

TEST(Run, DataRowsReproducibleAcrossRunsAndThreads) {
  const fs::path a = scratch("rep_a"), b = scratch("rep_b");
  ExperimentConfig ca = golden_config("digits", a);
  ExperimentConfig cb = golden_config("digits", b);
  cb.threads = 3;
  run_experiment(ca);
  run_experiment(cb);
  const std::string ra = data_rows((a / "digits_n12_s42.csv").string());
  EXPECT_FALSE(ra.empty());
  EXPECT_EQ(ra, data_rows((b / "digits_n12_s42.csv").string()));
}

TEST(Run, AllNumericColumnsFinite) {
  const fs::path out = scratch("finite");
  for (const std::string e : {"cycles", "digits", "stationary"}) {
    ExperimentConfig cfg = golden_config(e, out);
    cfg.cells = 512;
    for (const std::string& f : run_experiment(cfg).files) {
      if (f.size() < 4 || f.substr(f.size() - 4) != ".csv") continue;
      std::stringstream rows(data_rows(f));
      std::string line;
      std::getline(rows, line);  // column names
      while (std::getline(rows, line)) {
        std::stringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
          EXPECT_EQ(cell.find("nan"), std::string::npos) << f;
          EXPECT_EQ(cell.find("inf"), std::string::npos) << f;
        }
      }
    }
  }
}

TEST(Run, ValidateReportsBadSystem) {
  const fs::path out = scratch("validate");
  ExperimentConfig cfg = parse_config(
      R"({"system": {"maps": [{"kind": "affine_markov", "breakpoints": [0, 0.5, 1], "slopes": [1.5, 2], "intercepts": [0, -1]}]},
          "experiment": "validate"})");
  cfg.out_dir = out.string();
  EXPECT_EQ(run_experiment(cfg).status, 1);
  cfg = golden_config("validate", out);
  const RunResult ok = run_experiment(cfg);
  EXPECT_EQ(ok.status, 0);
  EXPECT_EQ(ok.summary["results"]["mixing_index"].get<int>(), 3);
}

TEST(Run, SizeGuard) {
  ExperimentConfig cfg = golden_config("cycles", scratch("guard"));
  cfg.max_words = 10;
  EXPECT_THROW(run_experiment(cfg), SizeGuardError);
}

TEST(Run, PreimagesNeedInteriorBasePoint) {
  ExperimentConfig cfg = golden_config("preimages", scratch("pre"));
  cfg.cells = 256;
  EXPECT_THROW(run_experiment(cfg), ConfigError);
  cfg.x0 = 1.0;
  EXPECT_THROW(run_experiment(cfg), ConfigError);
  cfg.x0 = 0.3;
  EXPECT_EQ(run_experiment(cfg).status, 0);
}

TEST(Format, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0 / 7.0), "0.14285714285714285");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(std::stod(format_double(M_PI)), M_PI);
}
