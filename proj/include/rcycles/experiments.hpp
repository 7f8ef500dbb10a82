#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rcycles/beta.hpp"
#include "rcycles/cycles.hpp"
#include "rcycles/lsv.hpp"

namespace rcycles {

const std::vector<std::string>& experiment_names();

struct ExperimentConfig {
  nlohmann::json system;  // {"preset": ...} or {"maps": [...], "p": [...]}
  std::string experiment;
  std::vector<std::size_t> n_list{8};
  std::vector<std::uint64_t> seeds{42};
  std::optional<double> x0;
  std::size_t cells = 4096;
  std::string out_dir = ".";
  unsigned threads = 1;
  std::size_t n_max = 1000;       // lsv-tails
  std::size_t eta_samples = 500;  // annealed
  double markov_tol = 1e-9;
  double dedupe_tol = 1e-9;
  double ulam_tol = 1e-12;
  double max_words = 1e8;
  nlohmann::json source;  // the parsed document, for hashing
};

// Parses and checks a config document. Throws ConfigError carrying the offending field, or the
// line and column for malformed JSON.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

// A system built from a config, with its beta structure when it is a greedy/lazy pair.
struct BuiltSystem {
  RandomSystem system;
  std::optional<BetaSystem> beta;
  std::vector<double> lsv_alphas;  // one per L-S-V map
  bool golden = false;
};

BuiltSystem build_system(const nlohmann::json& spec);

// FNV-1a 64 of the canonical dump of the config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

// 17 significant digits, '.' decimal, locale-independent.
std::string format_double(double v);

struct RunResult {
  int status = 0;  // 0 ok, 1 numerical failure
  nlohmann::json summary;
  std::vector<std::string> files;
};

// Runs cfg.experiment and writes its CSV files and summary.json into cfg.out_dir.
RunResult run_experiment(const ExperimentConfig& cfg);

}  // namespace rcycles
