#pragma once

#include <cstddef>
#include <cstdint>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rcycles/measures.hpp"
#include "rcycles/symbolic.hpp"

namespace rcycles {

// A point x with T_omega^n(x) = x, found in the cylinder of `word`.
struct Cycle {
  SymbolWord word;
  double point;
  double log_weight;          // -log |(T_omega^n)'(x)|, summed along the orbit
  std::vector<double> orbit;  // T_omega^k(x), k = 0..n-1
};

struct CycleOptions {
  bool dedupe = true;
  double dedupe_tol = 1e-9;
  unsigned threads = 1;
  double max_words = 1e8;
};

// All random cycles of period n = omega.size(), sorted by point.
struct CycleSet {
  SampleWord omega;
  std::vector<Cycle> cycles;
  double log_z = -std::numeric_limits<double>::infinity();  // log Z_{omega,n}
  std::size_t boundary_coincidences = 0;   // roots merged away by deduplication
  std::size_t rejected_endpoint_roots = 0; // closure roots that the actual map does not fix
  std::size_t words_visited = 0;

  std::size_t n() const noexcept { return omega.size(); }
  double z() const { return std::exp(log_z); }
  double weight(const Cycle& c) const { return std::exp(c.log_weight - log_z); }
};

// Unique fixed point of f_{a_1..a_n} on the closed cylinder, or nullopt. Interior roots are
// bracketed and bisected to 1e-12, then polished by one Newton step. A root at a cylinder
// endpoint is accepted only if the composition T_omega^n, evaluated with the half-open branch
// convention, fixes it as well.
std::optional<Cycle> find_cycle_in_cylinder(const CodedSystem& cs, std::span<const int> word);

// Same, but also reports a rejected endpoint root through `rejected`.
std::optional<Cycle> find_cycle_in_cylinder(const CodedSystem& cs, std::span<const int> word, bool& rejected);

// Enumerates Fix(T_omega^n) over every admissible word. Workers split the word tree by prefix;
// the result does not depend on the thread count. Throws SizeGuardError past max_words and
// NumericalError when nothing is found although n >= n_0.
CycleSet enumerate_cycles(const CodedSystem& cs, std::span<const int> omega, const CycleOptions& opts = {});

// xi_n^omega: each orbit point of each cycle carries w(x) / (n Z).
WeightedPointMeasure cycle_measure_xi(const CycleSet& set);

// mu_{omega,n}: atoms at the cycle points with weights w(x) / Z.
WeightedPointMeasure cycle_point_measure(const CycleSet& set);

// Every omega word of length n (lexicographic) with its cycle set, Z_{p,n} and the annealed
// level-1 measure zeta_{p,n} (weights Q_p(omega) w(x) spread over orbits).
struct SkewEnumeration {
  std::size_t n = 0;
  std::vector<CycleSet> per_omega;
  std::vector<double> log_q;
  double log_z = -std::numeric_limits<double>::infinity();
  WeightedPointMeasure zeta;
};

SkewEnumeration enumerate_skew_fixed_points(const CodedSystem& cs, std::size_t n, const CycleOptions& opts = {});

// log Z_{p,n} through a flat walk over periodic symbol words (m_{a_n a_1} = 1), grouped by the
// induced omega afterwards. Independent of the per-omega route above.
double log_z_from_periodic_words(const CodedSystem& cs, std::size_t n, const CycleOptions& opts = {});

// Monte Carlo eta_{p,n}: equal-weight mixture of xi_n^omega over omega sampled from m_p, one per seed.
WeightedPointMeasure sample_averaged_measure(const CodedSystem& cs, std::size_t n,
                                             std::span<const std::uint64_t> seeds, const CycleOptions& opts = {});

struct PreimageSet {
  SampleWord omega;
  double x0;
  std::vector<Cycle> preimages;  // Cycle::point is the preimage, orbit its forward prefix
  double log_z = -std::numeric_limits<double>::infinity();
  WeightedPointMeasure measure;  // orbit-spread and weighted by |(T_omega^n)'x|^{-1}
};

// Pre(T_omega^n, x0). Throws DomainError when x0 is not interior or sits on a cell boundary.
PreimageSet enumerate_preimages(const CodedSystem& cs, std::span<const int> omega, double x0);

struct Pressure {
  double per_sample;                // (1/n) log Z_{omega,n}
  std::optional<double> annealed;   // (1/n) log Z_{p,n}, when the skew enumeration fits the budget
};

Pressure pressure_from_cycles(const CodedSystem& cs, std::span<const int> omega, const CycleOptions& opts = {},
                              bool with_annealed = true);

// Observable on the skew product: phi(letter omega_1, x).
using SkewObservable = std::function<double(int letter, double x)>;
using CycleFunctional = std::function<double(const CycleSet&, const Cycle&)>;

// Z^{-1} sum_x w(x) F(cycle). Throws NumericalError naming the cycle when F is not finite.
double weighted_functional_average(const CycleSet& set, const CycleFunctional& functional);

// (1/n) sum_k phi(R^k(omega, x)).
CycleFunctional birkhoff_average(SkewObservable phi);
// sum_k phi / sum_k psi.
CycleFunctional birkhoff_ratio(SkewObservable phi, SkewObservable psi);
// (1/n^2) sum_k phi * sum_k psi.
CycleFunctional birkhoff_product(SkewObservable phi, SkewObservable psi);
// (1/n^2) sum_{k1,k2} g(pi1(R^{k1}) + pi2(R^{k2})).
CycleFunctional double_sum_convolution(SkewObservable pi1, SkewObservable pi2, std::function<double(double)> g);

}  // namespace rcycles
