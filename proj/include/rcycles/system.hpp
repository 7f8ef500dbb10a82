#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rcycles/markov_map.hpp"

namespace rcycles {

// Finitely many Markov maps on a common interval X, chosen i.i.d. with probabilities p.
// N = 1 is allowed and gives the deterministic system.
class RandomSystem {
 public:
  // `identify_endpoints` treats X as a circle (lo ~ hi) when comparing points, as for the
  // doubling map x -> 2x mod 1.
  RandomSystem(std::vector<MarkovMap> maps, std::vector<double> p, bool identify_endpoints = false);

  const Interval& ambient() const noexcept { return maps_.front().ambient(); }
  std::span<const MarkovMap> maps() const noexcept { return maps_; }
  const MarkovMap& map(std::size_t i) const { return maps_.at(i); }
  std::span<const double> p() const noexcept { return p_; }
  std::size_t size() const noexcept { return maps_.size(); }
  bool identify_endpoints() const noexcept { return identify_endpoints_; }

  // Same maps, different probability vector.
  RandomSystem with_p(std::vector<double> p) const;

  // T_omega^n(x) through MarkovMap::evaluate (the half-open branch convention).
  double compose(std::span<const int> omega, double x) const;

 private:
  std::vector<MarkovMap> maps_;
  std::vector<double> p_;
  bool identify_endpoints_;
};

// Letters are 0-based map indices.
using SampleWord = std::vector<int>;

// Seeded i.i.d. stream of letters distributed according to p. The generator is mt19937_64 and
// the letter draw uses the top 53 bits, so a (p, seed) pair gives the same stream everywhere.
// Prefixes are stable: the first n letters do not depend on how many are requested later.
class SampleStream {
 public:
  SampleStream(std::span<const double> p, std::uint64_t seed);

  int next();
  SampleWord take(std::size_t n);

 private:
  std::vector<double> cumulative_;
  std::mt19937_64 engine_;
};

SampleWord sample_word(std::span<const double> p, std::size_t n, std::uint64_t seed);

// Q_p(omega_1 ... omega_n) in log form.
double log_word_probability(std::span<const double> p, std::span<const int> omega);

}  // namespace rcycles
