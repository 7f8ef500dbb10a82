#include "rcycles/cycles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

namespace rcycles {
namespace {

constexpr double kBisectTol = 1e-12;
// Orbit points of one cycle reached from different cylinders agree to a few ulps.
constexpr double kOrbitMergeTol = 1e-12;
constexpr double kEndpointTol = 1e-10;

const Branch& branch_of(const CodedSystem& cs, int a) {
  const Symbol& s = cs.alphabet[static_cast<std::size_t>(a)];
  return cs.system.map(static_cast<std::size_t>(s.map)).branch(static_cast<std::size_t>(s.branch));
}

struct Composition {
  double value;
  double derivative;
};

Composition compose_word(const CodedSystem& cs, std::span<const int> word, double x) {
  double d = 1.0;
  for (int a : word) {
    const Branch& br = branch_of(cs, a);
    d *= br.derivative(x);
    x = br.value(x);
  }
  return {x, d};
}

SampleWord owners(const CodedSystem& cs, std::span<const int> word) {
  SampleWord omega(word.size());
  for (std::size_t k = 0; k < word.size(); ++k) omega[k] = cs.alphabet[static_cast<std::size_t>(word[k])].map;
  return omega;
}

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

std::string word_string(std::span<const int> word) {
  std::ostringstream os;
  for (std::size_t k = 0; k < word.size(); ++k) os << (k ? "-" : "") << word[k] + 1;
  return os.str();
}

Cycle make_cycle(const CodedSystem& cs, std::span<const int> word, double x) {
  Cycle c{SymbolWord(word.begin(), word.end()), x, 0.0, {}};
  c.orbit.reserve(word.size());
  for (int a : word) {
    const Symbol& s = cs.alphabet[static_cast<std::size_t>(a)];
    x = s.cell.clamp(x);
    c.orbit.push_back(x);
    const Branch& br = branch_of(cs, a);
    c.log_weight -= std::log(std::abs(br.derivative(x)));
    x = br.value(x);
  }
  if (!c.orbit.empty()) c.point = c.orbit.front();
  return c;
}

// Point with the two ends of X identified when the system is a circle map.
double dedupe_key(const RandomSystem& sys, double x, double tol) {
  if (sys.identify_endpoints() && std::abs(x - sys.ambient().hi()) <= tol) return sys.ambient().lo();
  return x;
}

template <class Visit>
void extend_words(const CodedSystem& cs, std::span<const int> omega, SymbolWord& word, std::size_t depth,
                  std::size_t stop, Visit& visit) {
  if (depth == stop) {
    visit(std::span<const int>(word.data(), stop));
    return;
  }
  for (int a : cs.alphabet.symbols_of(static_cast<std::size_t>(omega[depth]))) {
    if (depth > 0 && !cs.matrix(static_cast<std::size_t>(word[depth - 1]), static_cast<std::size_t>(a))) continue;
    word[depth] = a;
    extend_words(cs, omega, word, depth + 1, stop, visit);
  }
}

struct RawCycles {
  std::vector<Cycle> cycles;
  std::size_t rejected = 0;
  std::size_t visited = 0;
};

// Keeps, within each cluster of points closer than tol, the entry with the smallest index.
// Returns the surviving indices sorted by (point, index).
std::vector<std::size_t> dedupe_indices(const RandomSystem& sys, std::span<const double> points, double tol,
                                        bool enabled) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t i) { return dedupe_key(sys, points[i], tol); };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  if (!enabled) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
    return order;
  }
  std::vector<std::size_t> keep;
  std::size_t k = 0;
  while (k < order.size()) {
    std::size_t best = order[k];
    const double anchor = key(order[k]);
    std::size_t j = k + 1;
    while (j < order.size() && key(order[j]) - anchor <= tol) {
      best = std::min(best, order[j]);
      ++j;
    }
    keep.push_back(best);
    k = j;
  }
  std::sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
    return points[a] < points[b] || (points[a] == points[b] && a < b);
  });
  return keep;
}

}  // namespace

std::optional<Cycle> find_cycle_in_cylinder(const CodedSystem& cs, std::span<const int> word, bool& rejected) {
  rejected = false;
  if (word.empty()) throw DomainError("cycle search needs a nonempty word");
  const Interval K = cylinder_interval(cs, word);
  const Composition at_lo = compose_word(cs, word, K.lo());
  const Composition at_hi = compose_word(cs, word, K.hi());
  const double g_lo = at_lo.value - K.lo();
  const double g_hi = at_hi.value - K.hi();

  // Endpoint zeros are judged by their distance in x, hence the derivative scaling.
  const bool zero_lo = std::abs(g_lo) <= kBisectTol * std::max(1.0, std::abs(at_lo.derivative));
  const bool zero_hi = std::abs(g_hi) <= kBisectTol * std::max(1.0, std::abs(at_hi.derivative));

  double x;
  if (zero_lo || zero_hi) {
    // Genuine iff no orbit point along the word sits on the open right end of its cell.
    x = zero_lo ? K.lo() : K.hi();
    const double top = cs.system.ambient().hi();
    double xk = x;
    for (int a : word) {
      const Interval& cell = cs.alphabet[static_cast<std::size_t>(a)].cell;
      xk = cell.clamp(xk);
      if (cell.hi() < top - kEndpointTol && cell.hi() - xk <= kEndpointTol) {
        rejected = true;
        return std::nullopt;
      }
      xk = branch_of(cs, a).value(xk);
    }
  } else if ((g_lo < 0.0) != (g_hi < 0.0)) {
    double lo = K.lo();
    double hi = K.hi();
    const bool lo_negative = g_lo < 0.0;
    while (hi - lo > kBisectTol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double gm = compose_word(cs, word, mid).value - mid;
      if (gm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((gm < 0.0) == lo_negative) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    x = 0.5 * (lo + hi);
    const Composition c = compose_word(cs, word, x);
    if (c.derivative != 1.0) {
      const double polished = x - (c.value - x) / (c.derivative - 1.0);
      if (polished >= lo - kBisectTol && polished <= hi + kBisectTol) x = polished;
    }
    x = K.clamp(x);
  } else {
    return std::nullopt;
  }
  return make_cycle(cs, word, x);
}

std::optional<Cycle> find_cycle_in_cylinder(const CodedSystem& cs, std::span<const int> word) {
  bool rejected = false;
  return find_cycle_in_cylinder(cs, word, rejected);
}

CycleSet enumerate_cycles(const CodedSystem& cs, std::span<const int> omega, const CycleOptions& opts) {
  const std::size_t n = omega.size();
  if (n == 0) throw DomainError("cycle enumeration needs n >= 1");
  const double estimate = count_admissible_words(cs, omega);
  if (estimate > opts.max_words) {
    std::ostringstream os;
    os << "enumeration of " << estimate << " words exceeds the budget of " << opts.max_words;
    throw SizeGuardError(os.str());
  }

  // Prefix tasks, in lexicographic order.
  const unsigned threads = std::max(1u, opts.threads);
  const std::size_t prefix_depth = threads > 1 ? std::min<std::size_t>(n, 4) : 0;
  std::vector<SymbolWord> prefixes;
  {
    SymbolWord word(n);
    auto collect = [&](std::span<const int> w) { prefixes.emplace_back(w.begin(), w.end()); };
    extend_words(cs, omega, word, 0, prefix_depth, collect);
  }

  std::vector<RawCycles> results(prefixes.size());
  auto run_task = [&](std::size_t t) {
    RawCycles& out = results[t];
    SymbolWord word(n);
    std::copy(prefixes[t].begin(), prefixes[t].end(), word.begin());
    auto visit = [&](std::span<const int> w) {
      ++out.visited;
      bool rejected = false;
      if (auto c = find_cycle_in_cylinder(cs, w, rejected)) out.cycles.push_back(std::move(*c));
      if (rejected) ++out.rejected;
    };
    extend_words(cs, omega, word, prefix_depth, n, visit);
  };
  if (threads == 1 || prefixes.size() <= 1) {
    for (std::size_t t = 0; t < prefixes.size(); ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(threads, prefixes.size()); ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < prefixes.size(); t = next++) run_task(t);
      });
    }
    for (auto& th : pool) th.join();
  }

  CycleSet set;
  set.omega.assign(omega.begin(), omega.end());
  std::vector<Cycle> raw;
  for (auto& r : results) {
    set.rejected_endpoint_roots += r.rejected;
    set.words_visited += r.visited;
    for (auto& c : r.cycles) raw.push_back(std::move(c));
  }
  std::vector<double> points(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) points[i] = raw[i].point;
  const std::vector<std::size_t> keep = dedupe_indices(cs.system, points, opts.dedupe_tol, opts.dedupe);
  set.boundary_coincidences = raw.size() - keep.size();
  set.cycles.reserve(keep.size());
  for (std::size_t i : keep) set.cycles.push_back(std::move(raw[i]));

  if (set.cycles.empty()) {
    const auto n0 = mixing_index(cs.matrix, 64);
    if (n0 && n >= static_cast<std::size_t>(*n0)) {
      throw NumericalError("no random cycle found although n is at least the mixing index");
    }
    return set;
  }
  std::vector<double> lw(set.cycles.size());
  for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = set.cycles[i].log_weight;
  set.log_z = log_sum_exp(lw);
  return set;
}

WeightedPointMeasure cycle_measure_xi(const CycleSet& set) {
  if (set.cycles.empty()) throw DomainError("empty cycle set has no measure");
  std::vector<Atom> atoms;
  atoms.reserve(set.cycles.size() * set.n());
  const double inv_n = 1.0 / static_cast<double>(set.n());
  for (const Cycle& c : set.cycles) {
    const double w = set.weight(c) * inv_n;
    for (double x : c.orbit) atoms.push_back({x, w});
  }
  return WeightedPointMeasure::from_weights(std::move(atoms), kOrbitMergeTol);
}

WeightedPointMeasure cycle_point_measure(const CycleSet& set) {
  if (set.cycles.empty()) throw DomainError("empty cycle set has no measure");
  std::vector<Atom> atoms;
  atoms.reserve(set.cycles.size());
  for (const Cycle& c : set.cycles) atoms.push_back({c.point, set.weight(c)});
  return WeightedPointMeasure::from_weights(std::move(atoms));
}

SkewEnumeration enumerate_skew_fixed_points(const CodedSystem& cs, std::size_t n, const CycleOptions& opts) {
  if (n == 0) throw DomainError("skew enumeration needs n >= 1");
  const double estimate = count_all_words(cs, n);
  if (estimate > opts.max_words) {
    std::ostringstream os;
    os << "skew enumeration of " << estimate << " words exceeds the budget of " << opts.max_words;
    throw SizeGuardError(os.str());
  }
  const std::size_t N = cs.system.size();
  SkewEnumeration out;
  out.n = n;
  SampleWord omega(n, 0);
  while (true) {
    out.per_omega.push_back(enumerate_cycles(cs, omega, opts));
    out.log_q.push_back(log_word_probability(cs.system.p(), omega));
    // Next omega in lexicographic order.
    std::size_t k = n;
    while (k > 0 && static_cast<std::size_t>(omega[k - 1]) + 1 == N) omega[--k] = 0;
    if (k == 0) break;
    ++omega[k - 1];
  }
  std::vector<double> terms;
  for (std::size_t i = 0; i < out.per_omega.size(); ++i) {
    if (!out.per_omega[i].cycles.empty()) terms.push_back(out.log_q[i] + out.per_omega[i].log_z);
  }
  out.log_z = log_sum_exp(terms);
  if (!std::isfinite(out.log_z)) throw NumericalError("skew product has no periodic point of this period");

  std::vector<Atom> atoms;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < out.per_omega.size(); ++i) {
    for (const Cycle& c : out.per_omega[i].cycles) {
      const double w = std::exp(out.log_q[i] + c.log_weight - out.log_z) * inv_n;
      for (double x : c.orbit) atoms.push_back({x, w});
    }
  }
  out.zeta = WeightedPointMeasure::from_weights(std::move(atoms), kOrbitMergeTol);
  return out;
}

double log_z_from_periodic_words(const CodedSystem& cs, std::size_t n, const CycleOptions& opts) {
  if (n == 0) throw DomainError("periodic word walk needs n >= 1");
  const double estimate = count_all_words(cs, n);
  if (estimate > opts.max_words) throw SizeGuardError("periodic word walk exceeds the word budget");

  struct Hit {
    SampleWord omega;
    double point;
    double log_term;
  };
  std::vector<Hit> hits;
  const std::size_t A = cs.alphabet.size();
  SymbolWord word(n);
  std::vector<std::size_t> pos(n, 0);
  std::size_t depth = 0;
  // Flat depth-first walk over all symbol words; no omega is fixed in advance.
  while (true) {
    bool advanced = false;
    while (pos[depth] < A) {
      const auto a = pos[depth]++;
      if (depth > 0 && !cs.matrix(static_cast<std::size_t>(word[depth - 1]), a)) continue;
      word[depth] = static_cast<int>(a);
      advanced = true;
      break;
    }
    if (!advanced) {
      if (depth == 0) break;
      pos[depth] = 0;
      --depth;
      continue;
    }
    if (depth + 1 < n) {
      pos[++depth] = 0;
      continue;
    }
    if (!cs.matrix(static_cast<std::size_t>(word[n - 1]), static_cast<std::size_t>(word[0]))) continue;
    if (auto c = find_cycle_in_cylinder(cs, word)) {
      SampleWord omega = owners(cs, word);
      const double lq = log_word_probability(cs.system.p(), omega);
      hits.push_back({std::move(omega), c->point, lq + c->log_weight});
    }
  }

  std::stable_sort(hits.begin(), hits.end(), [&](const Hit& a, const Hit& b) {
    if (a.omega != b.omega) return a.omega < b.omega;
    return dedupe_key(cs.system, a.point, opts.dedupe_tol) < dedupe_key(cs.system, b.point, opts.dedupe_tol);
  });
  std::vector<double> terms;
  for (std::size_t i = 0; i < hits.size();) {
    terms.push_back(hits[i].log_term);
    const double anchor = dedupe_key(cs.system, hits[i].point, opts.dedupe_tol);
    std::size_t j = i + 1;
    while (opts.dedupe && j < hits.size() && hits[j].omega == hits[i].omega &&
           dedupe_key(cs.system, hits[j].point, opts.dedupe_tol) - anchor <= opts.dedupe_tol) {
      ++j;
    }
    i = j;
  }
  std::sort(terms.begin(), terms.end());
  return log_sum_exp(terms);
}

WeightedPointMeasure sample_averaged_measure(const CodedSystem& cs, std::size_t n,
                                             std::span<const std::uint64_t> seeds, const CycleOptions& opts) {
  if (seeds.empty()) throw DomainError("sample averaging needs at least one seed");
  std::vector<WeightedPointMeasure> parts;
  parts.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    const SampleWord omega = sample_word(cs.system.p(), n, seed);
    parts.push_back(cycle_measure_xi(enumerate_cycles(cs, omega, opts)));
  }
  return WeightedPointMeasure::mixture(parts);
}

PreimageSet enumerate_preimages(const CodedSystem& cs, std::span<const int> omega, double x0) {
  const Interval& X = cs.system.ambient();
  if (!(x0 > X.lo() && x0 < X.hi())) throw DomainError("preimage base point must lie in the interior of X");
  for (const MarkovMap& m : cs.system.maps()) {
    for (double b : m.partition_points()) {
      if (std::abs(b - x0) <= 1e-12) throw DomainError("preimage base point sits on a cell boundary");
    }
  }
  for (int letter : omega) {
    if (letter < 0 || static_cast<std::size_t>(letter) >= cs.system.size()) throw DomainError("letter out of range");
  }
  PreimageSet out;
  out.omega.assign(omega.begin(), omega.end());
  out.x0 = x0;
  const std::size_t n = omega.size();
  if (n == 0) {
    out.preimages.push_back(Cycle{{}, x0, 0.0, {}});
    out.log_z = 0.0;
    out.measure = WeightedPointMeasure::dirac(x0);
    return out;
  }

  SymbolWord word(n);
  std::vector<double> chain(n + 1);
  chain[n] = x0;
  // Backward walk: choose the branch of map omega[k-1] whose image holds chain[k].
  auto back = [&](auto&& self, std::size_t k, double log_weight) -> void {
    if (k == 0) {
      out.preimages.push_back(Cycle{word, chain[0], log_weight, std::vector<double>(chain.begin(), chain.end() - 1)});
      return;
    }
    const auto letter = static_cast<std::size_t>(omega[k - 1]);
    for (int a : cs.alphabet.symbols_of(letter)) {
      const Branch& br = branch_of(cs, a);
      const Interval img = br.image();
      const double y = chain[k];
      const bool inside = (y >= img.lo() && y < img.hi()) || (y == img.hi() && img.hi() >= X.hi());
      if (!inside) continue;
      const double x = br.inverse(y);
      word[k - 1] = a;
      chain[k - 1] = x;
      self(self, k - 1, log_weight - std::log(std::abs(br.derivative(x))));
    }
  };
  back(back, n, 0.0);

  std::sort(out.preimages.begin(), out.preimages.end(),
            [](const Cycle& a, const Cycle& b) { return a.word < b.word; });
  if (out.preimages.empty()) throw NumericalError("no preimage found");
  std::vector<double> lw;
  for (const Cycle& c : out.preimages) lw.push_back(c.log_weight);
  out.log_z = log_sum_exp(lw);
  std::vector<Atom> atoms;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (const Cycle& c : out.preimages) {
    const double w = std::exp(c.log_weight - out.log_z) * inv_n;
    for (double x : c.orbit) atoms.push_back({x, w});
  }
  out.measure = WeightedPointMeasure::from_weights(std::move(atoms));
  return out;
}

Pressure pressure_from_cycles(const CodedSystem& cs, std::span<const int> omega, const CycleOptions& opts,
                              bool with_annealed) {
  const CycleSet set = enumerate_cycles(cs, omega, opts);
  const double n = static_cast<double>(omega.size());
  Pressure p{set.log_z / n, std::nullopt};
  if (with_annealed && count_all_words(cs, omega.size()) <= opts.max_words) {
    p.annealed = enumerate_skew_fixed_points(cs, omega.size(), opts).log_z / n;
  }
  return p;
}

double weighted_functional_average(const CycleSet& set, const CycleFunctional& functional) {
  if (set.cycles.empty()) throw DomainError("empty cycle set");
  double acc = 0.0;
  for (const Cycle& c : set.cycles) {
    const double v = functional(set, c);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os.precision(17);
      os << "functional is not finite on the cycle " << word_string(c.word) << " at x = " << c.point;
      throw NumericalError(os.str());
    }
    acc += set.weight(c) * v;
  }
  return acc;
}

namespace {

double birkhoff_sum(const SkewObservable& phi, const CycleSet& set, const Cycle& c) {
  double s = 0.0;
  for (std::size_t k = 0; k < c.orbit.size(); ++k) s += phi(set.omega[k], c.orbit[k]);
  return s;
}

}  // namespace

CycleFunctional birkhoff_average(SkewObservable phi) {
  return [phi = std::move(phi)](const CycleSet& set, const Cycle& c) {
    return birkhoff_sum(phi, set, c) / static_cast<double>(c.orbit.size());
  };
}

CycleFunctional birkhoff_ratio(SkewObservable phi, SkewObservable psi) {
  return [phi = std::move(phi), psi = std::move(psi)](const CycleSet& set, const Cycle& c) {
    return birkhoff_sum(phi, set, c) / birkhoff_sum(psi, set, c);
  };
}

CycleFunctional birkhoff_product(SkewObservable phi, SkewObservable psi) {
  return [phi = std::move(phi), psi = std::move(psi)](const CycleSet& set, const Cycle& c) {
    const double n = static_cast<double>(c.orbit.size());
    return birkhoff_sum(phi, set, c) * birkhoff_sum(psi, set, c) / (n * n);
  };
}

CycleFunctional double_sum_convolution(SkewObservable pi1, SkewObservable pi2, std::function<double(double)> g) {
  return [pi1 = std::move(pi1), pi2 = std::move(pi2), g = std::move(g)](const CycleSet& set, const Cycle& c) {
    const std::size_t n = c.orbit.size();
    std::vector<double> a(n), b(n);
    for (std::size_t k = 0; k < n; ++k) {
      a[k] = pi1(set.omega[k], c.orbit[k]);
      b[k] = pi2(set.omega[k], c.orbit[k]);
    }
    double s = 0.0;
    for (double u : a) {
      for (double v : b) s += g(u + v);
    }
    return s / static_cast<double>(n * n);
  };
}

}  // namespace rcycles
