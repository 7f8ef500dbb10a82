#include "rcycles/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <locale>
#include <set>
#include <sstream>

#ifndef RCYCLES_VERSION
#define RCYCLES_VERSION "0.0.0"
#endif

namespace rcycles {
namespace {

using nlohmann::json;

const std::set<std::string> kTopLevelKeys{"system", "experiment", "n", "n_list", "seed", "seeds", "x0", "cells",
                                          "out", "threads", "n_max", "eta_samples", "tolerances", "max_words"};

double number_at(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(field, "expected a finite number");
  return v;
}

std::uint64_t unsigned_at(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) throw ConfigError(field, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

std::vector<double> numbers_at(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number_at(j[k], field + "[" + std::to_string(k) + "]"));
  return out;
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string word_string(std::span<const int> word) {
  std::string s;
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (k) s += '-';
    s += std::to_string(word[k] + 1);
  }
  return s;
}

std::string omega_string(std::span<const int> omega) {
  std::string s;
  for (int l : omega) s += std::to_string(l + 1);
  return s;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Digit emitted by each symbol, when every branch is a beta piece.
std::optional<std::vector<int>> symbol_digits(const CodedSystem& cs) {
  std::vector<int> out;
  for (const Symbol& s : cs.alphabet.symbols()) {
    const Branch& br = cs.system.map(static_cast<std::size_t>(s.map)).branch(static_cast<std::size_t>(s.branch));
    const auto* piece = std::get_if<BetaPiece>(&br.formula());
    if (!piece) return std::nullopt;
    out.push_back(piece->offset);
  }
  return out;
}

class CsvWriter {
 public:
  CsvWriter(const ExperimentConfig& cfg, const std::string& name, const std::string& seed_note,
            const std::vector<std::string>& columns, RunResult& result)
      : path_((std::filesystem::path(cfg.out_dir) / name).string()) {
    out_.imbue(std::locale::classic());
    out_.open(path_);
    if (!out_) throw ConfigError("out", "cannot write " + path_);
    out_ << "# rcycles " << RCYCLES_VERSION << "\n";
    out_ << "# config_hash " << config_hash(cfg) << "\n";
    out_ << "# seed " << seed_note << "\n";
    out_ << "# generated " << utc_timestamp() << "\n";
    row(columns);
    result.files.push_back(path_);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out_ << (k ? "," : "") << cells[k];
    out_ << "\n";
  }

 private:
  std::string path_;
  std::ofstream out_;
};

std::string seeds_note(const ExperimentConfig& cfg) {
  std::string s;
  for (std::size_t k = 0; k < cfg.seeds.size(); ++k) s += (k ? ";" : "") + std::to_string(cfg.seeds[k]);
  return s;
}

CycleOptions cycle_options(const ExperimentConfig& cfg) {
  CycleOptions o;
  o.dedupe_tol = cfg.dedupe_tol;
  o.threads = cfg.threads;
  o.max_words = cfg.max_words;
  return o;
}

CodedSystem code(const BuiltSystem& b, const ExperimentConfig& cfg) {
  if (b.beta) return b.beta->coded;
  return build_alphabet_and_matrix(b.system, cfg.markov_tol);
}

PiecewiseConstantDensity stationary_density(const CodedSystem& cs, const ExperimentConfig& cfg, json* info = nullptr) {
  UlamOptions o;
  o.cells = cfg.cells;
  o.tol = cfg.ulam_tol;
  o.threads = cfg.threads;
  UlamResult r = ulam_stationary(cs.system, o);
  if (info) {
    (*info)["ulam_iterations"] = r.iterations;
    (*info)["ulam_residual"] = r.residual;
  }
  return std::move(r.density);
}

void write_density(const ExperimentConfig& cfg, const PiecewiseConstantDensity& d, RunResult& result) {
  CsvWriter w(cfg, "density.csv", "none", {"breakpoint_lo", "breakpoint_hi", "value"}, result);
  const auto bp = d.breakpoints();
  const auto v = d.values();
  for (std::size_t k = 0; k < v.size(); ++k) w.row({format_double(bp[k]), format_double(bp[k + 1]), format_double(v[k])});
}

// ---- experiments ----

void run_validate(const ExperimentConfig& cfg, const BuiltSystem& b, RunResult& result) {
  json maps = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < b.system.size(); ++i) {
    const ValidationReport rep = validate_markov(b.system.map(i), cfg.markov_tol);
    json jm{{"map", i + 1}, {"passed", rep.passed}, {"max_endpoint_mismatch", rep.max_endpoint_mismatch},
            {"failures", rep.failures}, {"non_expanding_points", rep.non_expanding_points}};
    json br = json::array();
    for (const BranchCoverage& c : rep.branches) {
      std::vector<std::size_t> cells;
      for (std::size_t k : c.covered_cells) cells.push_back(k + 1);
      br.push_back({{"label", c.label},
                    {"image", {c.image.lo(), c.image.hi()}},
                    {"covered_cells", cells},
                    {"endpoint_mismatch", c.endpoint_mismatch},
                    {"ok", c.ok}});
    }
    jm["branches"] = br;
    ok = ok && rep.passed;
    maps.push_back(jm);
  }
  json out{{"maps", maps}, {"pelikan_index", pelikan_index(b.system)}};
  try {
    const CodedSystem cs = code(b, cfg);
    const auto n0 = mixing_index(cs.matrix, 64);
    out["alphabet_size"] = cs.alphabet.size();
    out["irreducible"] = cs.matrix.irreducible();
    out["mixing_index"] = n0 ? json(*n0) : json(nullptr);
    json rows = json::array();
    for (std::size_t a = 0; a < cs.matrix.size(); ++a) {
      std::string r;
      for (std::size_t c = 0; c < cs.matrix.size(); ++c) r += cs.matrix(a, c) ? '1' : '0';
      rows.push_back(r);
    }
    out["transition_matrix"] = rows;
  } catch (const MarkovError& e) {
    ok = false;
    out["coding_error"] = e.what();
  }
  out["passed"] = ok;
  result.summary["results"] = out;
  if (!ok) result.status = 1;
}

void run_cycles(const ExperimentConfig& cfg, const BuiltSystem& b, RunResult& result) {
  const CodedSystem cs = code(b, cfg);
  const auto digits = symbol_digits(cs);
  json rows = json::array();
  for (std::size_t n : cfg.n_list) {
    for (std::uint64_t seed : cfg.seeds) {
      const SampleWord omega = sample_word(cs.system.p(), n, seed);
      const CycleSet set = enumerate_cycles(cs, omega, cycle_options(cfg));
      CsvWriter w(cfg, "cycles_n" + std::to_string(n) + "_s" + std::to_string(seed) + ".csv", std::to_string(seed),
                  {"word", "x", "log_weight", "orbit", "digits"}, result);
      for (const Cycle& c : set.cycles) {
        std::string orbit;
        for (std::size_t k = 0; k < c.orbit.size(); ++k) orbit += (k ? ";" : "") + format_double(c.orbit[k]);
        std::string ds;
        if (digits) {
          for (int a : c.word) ds += std::to_string((*digits)[static_cast<std::size_t>(a)]);
        }
        w.row({word_string(c.word), format_double(c.point), format_double(c.log_weight), orbit, ds});
      }
      rows.push_back({{"n", n},
                      {"seed", seed},
                      {"omega", omega_string(omega)},
                      {"cycles", set.cycles.size()},
                      {"log_z", set.log_z},
                      {"z", set.z()},
                      {"pressure", set.log_z / static_cast<double>(n)},
                      {"boundary_coincidences", set.boundary_coincidences},
                      {"rejected_endpoint_roots", set.rejected_endpoint_roots},
                      {"words_visited", set.words_visited}});
    }
  }
  result.summary["results"] = rows;
}

void run_equidistribute(const ExperimentConfig& cfg, const BuiltSystem& b, RunResult& result) {
  const CodedSystem cs = code(b, cfg);
  json info;
  const PiecewiseConstantDensity density = stationary_density(cs, cfg, &info);
  write_density(cfg, density, result);
  CsvWriter w(cfg, "equidistribute.csv", seeds_note(cfg), {"n", "seed", "kolmogorov_distance"}, result);
  json per_n = json::array();
  std::vector<double> medians;
  for (std::size_t n : cfg.n_list) {
    std::vector<double> dist;
    for (std::uint64_t seed : cfg.seeds) {
      const CycleSet set = enumerate_cycles(cs, sample_word(cs.system.p(), n, seed), cycle_options(cfg));
      const double d = kolmogorov_distance(cycle_measure_xi(set), density);
      dist.push_back(d);
      w.row({std::to_string(n), std::to_string(seed), format_double(d)});
    }
    medians.push_back(median(dist));
    per_n.push_back({{"n", n}, {"median_distance", medians.back()}, {"distances", dist}});
  }
  bool monotone = true;
  for (std::size_t k = 1; k < medians.size(); ++k) monotone = monotone && medians[k] <= medians[k - 1];
  info["per_n"] = per_n;
  info["monotone_trend"] = monotone;
  result.summary["results"] = info;
}

void run_annealed(const ExperimentConfig& cfg, const BuiltSystem& b, RunResult& result) {
  const CodedSystem cs = code(b, cfg);
  const std::uint64_t base = cfg.seeds.front();
  std::vector<std::uint64_t> eta_seeds(cfg.eta_samples);
  for (std::size_t k = 0; k < eta_seeds.size(); ++k) eta_seeds[k] = base + k;
  CsvWriter w(cfg, "annealed.csv", std::to_string(base) + "+k",
              {"n", "log_z_words", "log_z_periodic", "relative_difference", "annealed_pressure", "kolmogorov_zeta_eta"},
              result);
  json rows = json::array();
  for (std::size_t n : cfg.n_list) {
    const SkewEnumeration sk = enumerate_skew_fixed_points(cs, n, cycle_options(cfg));
    const double lz2 = log_z_from_periodic_words(cs, n, cycle_options(cfg));
    const double rel = std::abs(std::expm1(lz2 - sk.log_z));
    const WeightedPointMeasure eta = sample_averaged_measure(cs, n, eta_seeds, cycle_options(cfg));
    const double d = kolmogorov_distance(sk.zeta, eta);
    const double pressure = sk.log_z / static_cast<double>(n);
    w.row({std::to_string(n), format_double(sk.log_z), format_double(lz2), format_double(rel), format_double(pressure),
           format_double(d)});
    CsvWriter zw(cfg, "zeta_n" + std::to_string(n) + ".csv", "none", {"point", "weight"}, result);
    for (const Atom& a : sk.zeta.atoms()) zw.row({format_double(a.point), format_double(a.weight)});
    rows.push_back({{"n", n},
                    {"log_z_words", sk.log_z},
                    {"log_z_periodic", lz2},
                    {"relative_difference", rel},
                    {"annealed_pressure", pressure},
                    {"kolmogorov_zeta_eta", d},
                    {"eta_samples", cfg.eta_samples}});
  }
  result.summary["results"] = rows;
}

void run_digits(const ExperimentConfig& cfg, const BuiltSystem& b, RunResult& result) {
  const CodedSystem cs = code(b, cfg);
  const auto digits = symbol_digits(cs);
  if (!digits) throw ConfigError("system", "digits needs beta_greedy / beta_lazy maps");
  const int max_digit = *std::max_element(digits->begin(), digits->end());
  json info;
  if (b.beta && cs.system.size() == 2) {
    const PiecewiseConstantDensity density = stationary_density(cs, cfg);
    const std::vector<double> q = q_from_density(*b.beta, cs.system.p(), density);
    info["q_ulam"] = q;
    std::vector<double> target = q;
    if (b.golden) {
      target = q_closed_form_golden(cs.system.p()[0]);
      info["q_closed_form"] = target;
    }
    info["target_freq_0"] = target[0];
    info["target_symmetric_mean"] = symmetric_mean_limit(target);
    info["target_mean_distance"] = mean_distance_limit(target);
  }
  std::vector<std::string> columns{"word", "x", "digits"};
  for (int d = 0; d <= max_digit; ++d) columns.push_back("freq_" + std::to_string(d));
  columns.push_back("symmetric_mean");
  columns.push_back("mean_distance");
  json rows = json::array();
  for (std::size_t n : cfg.n_list) {
    if (n < 2) throw ConfigError("n_list", "digit statistics need n >= 2");
    for (std::uint64_t seed : cfg.seeds) {
      const SampleWord omega = sample_word(cs.system.p(), n, seed);
      const CycleSet set = enumerate_cycles(cs, omega, cycle_options(cfg));
      CsvWriter w(cfg, "digits_n" + std::to_string(n) + "_s" + std::to_string(seed) + ".csv", std::to_string(seed),
                  columns, result);
      double f0 = 0.0, s = 0.0, dist = 0.0;
      for (const Cycle& c : set.cycles) {
        std::vector<int> ds;
        std::string text;
        for (int a : c.word) {
          ds.push_back((*digits)[static_cast<std::size_t>(a)]);
          text += std::to_string(ds.back());
        }
        const DigitStats st = digit_stats(ds, max_digit);
        std::vector<std::string> cells{word_string(c.word), format_double(c.point), text};
        for (double f : st.freq) cells.push_back(format_double(f));
        cells.push_back(format_double(st.symmetric_mean));
        cells.push_back(format_double(st.mean_distance));
        w.row(cells);
        const double wt = set.weight(c);
        f0 += wt * st.freq[0];
        s += wt * st.symmetric_mean;
        dist += wt * st.mean_distance;
      }
      rows.push_back({{"n", n},
                      {"seed", seed},
                      {"cycles", set.cycles.size()},
                      {"weighted_freq_0", f0},
                      {"weighted_symmetric_mean", s},
                      {"weighted_mean_distance", dist}});
    }
  }
  info["per_sample"] = rows;
  result.summary["results"] = info;
}

void run_stationary(const ExperimentConfig& cfg, const BuiltSystem& b, RunResult& result) {
  const CodedSystem cs = code(b, cfg);
  json info;
  const PiecewiseConstantDensity density = stationary_density(cs, cfg, &info);
  write_density(cfg, density, result);
  info["pelikan_index"] = pelikan_index(cs.system);
  if (b.beta && cs.system.size() == 2) {
    info["q_ulam"] = q_from_density(*b.beta, cs.system.p(), density);
    if (b.golden) {
      const double p1 = cs.system.p()[0];
      info["q_closed_form"] = q_closed_form_golden(p1);
      const PiecewiseConstantDensity exact = golden_density(p1);
      const auto bp = density.breakpoints();
      const auto v = density.values();
      const auto ebp = exact.breakpoints();
      double sup = 0.0;
      for (std::size_t k = 0; k < v.size(); ++k) {
        const double mid = 0.5 * (bp[k] + bp[k + 1]);
        const double h = bp[k + 1] - bp[k];
        const bool near = std::any_of(ebp.begin(), ebp.end(), [&](double e) { return std::abs(mid - e) < 1.5 * h; });
        if (!near) sup = std::max(sup, std::abs(v[k] - exact.value_at(mid)));
      }
      info["sup_norm_vs_closed_form"] = sup;
    }
  }
  result.summary["results"] = info;
}

void run_lsv_tails(const ExperimentConfig& cfg, const BuiltSystem& b, RunResult& result) {
  if (b.lsv_alphas.empty()) throw ConfigError("system", "lsv-tails needs L-S-V maps");
  json tails = json::array();
  std::size_t lsv_index = 0;
  for (std::size_t i = 0; i < b.system.size(); ++i) {
    const MarkovMap& m = b.system.map(i);
    if (!std::holds_alternative<LsvLeft>(m.branch(0).formula())) continue;
    const double alpha = b.lsv_alphas[lsv_index++];
    const ReturnTimeTail t = return_time_tail(m, 0, cfg.n_max);
    CsvWriter w(cfg, "tail_map" + std::to_string(i + 1) + ".csv", "none", {"n", "tail_measure"}, result);
    for (std::size_t k = 0; k < t.tail.size(); ++k) w.row({std::to_string(k + 1), format_double(t.tail[k])});
    tails.push_back({{"map", i + 1}, {"alpha", alpha}, {"exponent", t.exponent}, {"expected", -1.0 / alpha}});
  }
  json info{{"tails", tails}, {"case", to_string(classify_case(b.lsv_alphas))}};
  const CodedSystem cs = code(b, cfg);
  json profiles = json::array();
  for (std::uint64_t seed : cfg.seeds) {
    CsvWriter w(cfg, "profile_s" + std::to_string(seed) + ".csv", std::to_string(seed),
                {"n", "eps", "mass", "neutral_weight_normalized"}, result);
    for (std::size_t n : cfg.n_list) {
      const NeutralProfile pr = neutral_mass_profile(cs, sample_word(cs.system.p(), n, seed), cycle_options(cfg));
      for (std::size_t k = 0; k < pr.eps.size(); ++k) {
        w.row({std::to_string(n), format_double(pr.eps[k]), format_double(pr.mass[k]), format_double(pr.neutral_weight)});
      }
      profiles.push_back({{"n", n}, {"seed", seed}, {"eps", pr.eps}, {"mass", pr.mass}, {"neutral_weight", pr.neutral_weight}});
    }
  }
  info["profiles"] = profiles;
  result.summary["results"] = info;
}

void run_preimages(const ExperimentConfig& cfg, const BuiltSystem& b, RunResult& result) {
  if (!cfg.x0) throw ConfigError("x0", "preimages needs x0");
  const CodedSystem cs = code(b, cfg);
  json info;
  const PiecewiseConstantDensity density = stationary_density(cs, cfg, &info);
  json rows = json::array();
  for (std::size_t n : cfg.n_list) {
    for (std::uint64_t seed : cfg.seeds) {
      const SampleWord omega = sample_word(cs.system.p(), n, seed);
      PreimageSet pre;
      try {
        pre = enumerate_preimages(cs, omega, *cfg.x0);
      } catch (const DomainError& e) {
        throw ConfigError("x0", e.what());
      }
      CsvWriter w(cfg, "preimages_n" + std::to_string(n) + "_s" + std::to_string(seed) + ".csv", std::to_string(seed),
                  {"point", "weight"}, result);
      for (const Atom& a : pre.measure.atoms()) w.row({format_double(a.point), format_double(a.weight)});
      rows.push_back({{"n", n},
                      {"seed", seed},
                      {"preimages", pre.preimages.size()},
                      {"log_z", pre.log_z},
                      {"kolmogorov_distance", kolmogorov_distance(pre.measure, density)}});
    }
  }
  info["per_sample"] = rows;
  result.summary["results"] = info;
}

std::vector<double> p_or_uniform(const json& spec, std::size_t n) {
  if (!spec.contains("p")) return std::vector<double>(n, 1.0 / static_cast<double>(n));
  std::vector<double> p = numbers_at(spec["p"], "system.p");
  if (p.size() != n) throw ConfigError("system.p", "expected " + std::to_string(n) + " probabilities");
  double total = 0.0;
  for (double v : p) {
    if (!(v > 0.0 && v < 1.0) && !(n == 1 && v == 1.0)) throw ConfigError("system.p", "each probability must lie in (0,1)");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("system.p", "probabilities must sum to 1");
  return p;
}

RandomSystem make_random_system(std::vector<MarkovMap> maps, std::vector<double> p, bool periodic) {
  try {
    return RandomSystem(std::move(maps), std::move(p), periodic);
  } catch (const DomainError& e) {
    throw ConfigError("system.p", e.what());
  }
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"validate",   "cycles",    "equidistribute", "annealed",
                                              "digits",     "stationary", "lsv-tails",     "preimages"};
  return names;
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = cfg.source.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "malformed JSON at " + line_column(text, e.byte));
  }
  return config_from_json(doc);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kTopLevelKeys.count(key)) throw ConfigError(key, "unknown field");
  }
  ExperimentConfig cfg;
  cfg.source = doc;
  if (!doc.contains("system")) throw ConfigError("system", "missing");
  cfg.system = doc["system"].is_string() ? json{{"preset", doc["system"]}} : doc["system"];
  if (!cfg.system.is_object()) throw ConfigError("system", "expected an object or a preset name");
  if (doc.contains("experiment")) {
    if (!doc["experiment"].is_string()) throw ConfigError("experiment", "expected a string");
    cfg.experiment = doc["experiment"].get<std::string>();
  }
  if (doc.contains("n") && doc.contains("n_list")) throw ConfigError("n_list", "give either n or n_list");
  if (doc.contains("n")) cfg.n_list = {static_cast<std::size_t>(unsigned_at(doc["n"], "n"))};
  if (doc.contains("n_list")) {
    const json& j = doc["n_list"];
    if (!j.is_array() || j.empty()) throw ConfigError("n_list", "expected a non-empty array");
    cfg.n_list.clear();
    for (std::size_t k = 0; k < j.size(); ++k) {
      cfg.n_list.push_back(static_cast<std::size_t>(unsigned_at(j[k], "n_list[" + std::to_string(k) + "]")));
    }
  }
  for (std::size_t n : cfg.n_list) {
    if (n < 1) throw ConfigError(doc.contains("n") ? "n" : "n_list", "n must be >= 1");
  }
  if (doc.contains("seed") && doc.contains("seeds")) throw ConfigError("seeds", "give either seed or seeds");
  if (doc.contains("seed")) cfg.seeds = {unsigned_at(doc["seed"], "seed")};
  if (doc.contains("seeds")) {
    const json& j = doc["seeds"];
    if (!j.is_array() || j.empty()) throw ConfigError("seeds", "expected a non-empty array");
    cfg.seeds.clear();
    for (std::size_t k = 0; k < j.size(); ++k) cfg.seeds.push_back(unsigned_at(j[k], "seeds[" + std::to_string(k) + "]"));
  }
  if (doc.contains("x0")) cfg.x0 = number_at(doc["x0"], "x0");
  if (doc.contains("cells")) {
    cfg.cells = static_cast<std::size_t>(unsigned_at(doc["cells"], "cells"));
    if (cfg.cells < 2) throw ConfigError("cells", "need at least 2 cells");
  }
  if (doc.contains("out")) {
    if (!doc["out"].is_string()) throw ConfigError("out", "expected a path");
    cfg.out_dir = doc["out"].get<std::string>();
  }
  if (doc.contains("threads")) {
    cfg.threads = static_cast<unsigned>(unsigned_at(doc["threads"], "threads"));
    if (cfg.threads < 1) throw ConfigError("threads", "need at least one thread");
  }
  if (doc.contains("n_max")) {
    cfg.n_max = static_cast<std::size_t>(unsigned_at(doc["n_max"], "n_max"));
    if (cfg.n_max < 10) throw ConfigError("n_max", "need n_max >= 10");
  }
  if (doc.contains("eta_samples")) {
    cfg.eta_samples = static_cast<std::size_t>(unsigned_at(doc["eta_samples"], "eta_samples"));
    if (cfg.eta_samples < 1) throw ConfigError("eta_samples", "need at least one sample");
  }
  if (doc.contains("max_words")) cfg.max_words = number_at(doc["max_words"], "max_words");
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (!t.is_object()) throw ConfigError("tolerances", "expected an object");
    for (const auto& [key, value] : t.items()) {
      const double v = number_at(value, "tolerances." + key);
      if (!(v > 0.0)) throw ConfigError("tolerances." + key, "must be positive");
      if (key == "markov") {
        cfg.markov_tol = v;
      } else if (key == "dedupe") {
        cfg.dedupe_tol = v;
      } else if (key == "ulam") {
        cfg.ulam_tol = v;
      } else {
        throw ConfigError("tolerances." + key, "unknown tolerance");
      }
    }
  }
  build_system(cfg.system);  // fail early on a bad system
  return cfg;
}

BuiltSystem build_system(const json& spec) {
  if (spec.contains("preset") && spec.contains("maps")) throw ConfigError("system", "give either preset or maps");
  if (spec.contains("preset")) {
    if (!spec["preset"].is_string()) throw ConfigError("system.preset", "expected a string");
    const std::string name = spec["preset"].get<std::string>();
    if (name == "doubling") {
      return BuiltSystem{make_random_system({doubling_map()}, p_or_uniform(spec, 1), true), std::nullopt, {}, false};
    }
    if (name == "golden" || name == "beta") {
      const double beta = name == "golden" ? golden_ratio() : number_at(spec.value("beta", json()), "system.beta");
      if (!(beta > 1.0) || std::abs(beta - std::round(beta)) < 1e-12) {
        throw ConfigError("system.beta", "beta must be a non-integer > 1");
      }
      BetaSystem bs = build_beta_system(beta, p_or_uniform(spec, 2));
      RandomSystem sys = bs.coded.system;
      return BuiltSystem{std::move(sys), std::move(bs), {}, name == "golden"};
    }
    if (name == "lsv") {
      if (!spec.contains("alphas")) throw ConfigError("system.alphas", "missing");
      const std::vector<double> alphas = numbers_at(spec["alphas"], "system.alphas");
      for (double a : alphas) {
        if (!(a > 0.0)) throw ConfigError("system.alphas", "alpha must be positive");
      }
      std::vector<MarkovMap> maps;
      for (double a : alphas) maps.push_back(lsv_map(a));
      return BuiltSystem{make_random_system(std::move(maps), p_or_uniform(spec, alphas.size()), false), std::nullopt,
                         alphas, false};
    }
    throw ConfigError("system.preset", "unknown preset '" + name + "' (doubling, golden, beta, lsv)");
  }
  if (!spec.contains("maps")) throw ConfigError("system", "needs preset or maps");
  const json& jm = spec["maps"];
  if (!jm.is_array() || jm.empty()) throw ConfigError("system.maps", "expected a non-empty array");
  std::vector<MarkovMap> maps;
  std::vector<double> alphas;
  std::vector<std::string> kinds;
  std::vector<double> betas;
  for (std::size_t i = 0; i < jm.size(); ++i) {
    const std::string field = "system.maps[" + std::to_string(i) + "]";
    const json& m = jm[i];
    if (!m.is_object() || !m.contains("kind") || !m["kind"].is_string()) throw ConfigError(field + ".kind", "missing");
    const std::string kind = m["kind"].get<std::string>();
    kinds.push_back(kind);
    try {
      if (kind == "affine_markov") {
        for (const char* key : {"breakpoints", "slopes", "intercepts"}) {
          if (!m.contains(key)) throw ConfigError(field + "." + key, "missing");
        }
        const auto bp = numbers_at(m["breakpoints"], field + ".breakpoints");
        const auto sl = numbers_at(m["slopes"], field + ".slopes");
        const auto ic = numbers_at(m["intercepts"], field + ".intercepts");
        if (sl.size() + 1 != bp.size() || ic.size() != sl.size()) {
          throw ConfigError(field, "need one slope and intercept per cell");
        }
        maps.push_back(affine_markov_map(bp, sl, ic));
      } else if (kind == "beta_greedy" || kind == "beta_lazy") {
        const double beta = number_at(m.value("beta", json()), field + ".beta");
        if (!(beta > 1.0) || std::abs(beta - std::round(beta)) < 1e-12) {
          throw ConfigError(field + ".beta", "beta must be a non-integer > 1");
        }
        betas.push_back(beta);
        maps.push_back(kind == "beta_greedy" ? beta_greedy_map(beta) : beta_lazy_map(beta));
      } else if (kind == "lsv") {
        const double alpha = number_at(m.value("alpha", json()), field + ".alpha");
        if (!(alpha > 0.0)) throw ConfigError(field + ".alpha", "alpha must be positive");
        alphas.push_back(alpha);
        maps.push_back(lsv_map(alpha));
      } else {
        throw ConfigError(field + ".kind", "unknown kind '" + kind + "' (affine_markov, beta_greedy, beta_lazy, lsv)");
      }
    } catch (const DomainError& e) {
      throw ConfigError(field, e.what());
    }
  }
  bool periodic = false;
  if (spec.contains("periodic")) {
    if (!spec["periodic"].is_boolean()) throw ConfigError("system.periodic", "expected true or false");
    periodic = spec["periodic"].get<bool>();
  }
  std::vector<double> p = p_or_uniform(spec, maps.size());
  const bool pair = kinds.size() == 2 && kinds[0] == "beta_greedy" && kinds[1] == "beta_lazy" && betas[0] == betas[1];
  if (pair) {
    BetaSystem bs = build_beta_system(betas[0], p);
    RandomSystem sys = bs.coded.system;
    const bool golden = std::abs(betas[0] - golden_ratio()) < 1e-12;
    return BuiltSystem{std::move(sys), std::move(bs), {}, golden};
  }
  return BuiltSystem{make_random_system(std::move(maps), std::move(p), periodic), std::nullopt, alphas, false};
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), cfg.experiment) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("experiment", "unknown experiment '" + cfg.experiment + "'; valid: " + list);
  }
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw ConfigError("out", "cannot create " + cfg.out_dir + ": " + ec.message());
  const BuiltSystem b = build_system(cfg.system);
  RunResult result;
  result.summary = {{"version", RCYCLES_VERSION},
                    {"config_hash", config_hash(cfg)},
                    {"experiment", cfg.experiment},
                    {"seeds", cfg.seeds},
                    {"n_list", cfg.n_list},
                    {"generated", utc_timestamp()}};
  if (cfg.experiment == "validate") run_validate(cfg, b, result);
  if (cfg.experiment == "cycles") run_cycles(cfg, b, result);
  if (cfg.experiment == "equidistribute") run_equidistribute(cfg, b, result);
  if (cfg.experiment == "annealed") run_annealed(cfg, b, result);
  if (cfg.experiment == "digits") run_digits(cfg, b, result);
  if (cfg.experiment == "stationary") run_stationary(cfg, b, result);
  if (cfg.experiment == "lsv-tails") run_lsv_tails(cfg, b, result);
  if (cfg.experiment == "preimages") run_preimages(cfg, b, result);
  const std::string path = (std::filesystem::path(cfg.out_dir) / "summary.json").string();
  std::ofstream out(path);
  if (!out) throw ConfigError("out", "cannot write " + path);
  out << result.summary.dump(2) << "\n";
  result.files.push_back(path);
  return result;
}

}  // namespace rcycles
