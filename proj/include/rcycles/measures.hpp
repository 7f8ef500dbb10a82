#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rcycles/system.hpp"

namespace rcycles {

struct Atom {
  double point;
  double weight;
};

// Finitely supported probability measure. Atoms are sorted, exact duplicates merged, weights
// positive and normalized to total mass 1.
class WeightedPointMeasure {
 public:
  WeightedPointMeasure() = default;

  // Normalizes whatever positive weights it is given; throws DomainError on an empty or massless input.
  // Atoms whose points differ by at most merge_tol (after sorting) are pooled at the first point.
  static WeightedPointMeasure from_weights(std::vector<Atom> atoms, double merge_tol = 0.0);
  static WeightedPointMeasure dirac(double x);

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }

  // Sum of the stored weights (1 up to rounding).
  double mass() const noexcept;
  // Right-continuous CDF.
  double cdf(double x) const noexcept;
  // Mass of (-inf, x).
  double cdf_below(double x) const noexcept;
  // Mass of [a, b).
  double mass_in(double a, double b) const noexcept { return cdf_below(b) - cdf_below(a); }

  // Equal-weight (or weighted) mixture of measures.
  static WeightedPointMeasure mixture(std::span<const WeightedPointMeasure> parts,
                                      std::span<const double> weights = {});

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
};

// Density with respect to Lebesgue measure, constant on each cell [breakpoints[k], breakpoints[k+1]).
class PiecewiseConstantDensity {
 public:
  // Requires strictly increasing breakpoints, values.size() + 1 == breakpoints.size(), values >= 0.
  // Values are rescaled so the density integrates to 1.
  PiecewiseConstantDensity(std::vector<double> breakpoints, std::vector<double> values);

  static PiecewiseConstantDensity uniform(const Interval& x);

  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const double> values() const noexcept { return values_; }
  double lo() const noexcept { return breakpoints_.front(); }
  double hi() const noexcept { return breakpoints_.back(); }

  double value_at(double x) const noexcept;
  double cdf(double x) const noexcept;
  double integral(double a, double b) const noexcept { return cdf(b) - cdf(a); }
  double total_mass() const noexcept { return cumulative_.back(); }

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
  std::vector<double> cumulative_;
};

// sup_x |F_a(x) - F_b(x)|, with CDFs checked at and just below every atom and at every breakpoint.
double kolmogorov_distance(const WeightedPointMeasure& a, const WeightedPointMeasure& b);
double kolmogorov_distance(const WeightedPointMeasure& a, const PiecewiseConstantDensity& b);
double kolmogorov_distance(const PiecewiseConstantDensity& a, const WeightedPointMeasure& b);
double kolmogorov_distance(const PiecewiseConstantDensity& a, const PiecewiseConstantDensity& b);

// sup_x sum_i p_i / |T_i'(x)| over a uniform grid plus one-sided values at every branch endpoint.
// A value below 1 certifies Pelikan's condition.
double pelikan_index(const RandomSystem& system, std::size_t grid = 100000);

struct UlamOptions {
  std::size_t cells = 4096;
  double tol = 1e-12;
  std::size_t max_iter = 100000;
  unsigned threads = 1;
};

struct UlamResult {
  PiecewiseConstantDensity density;
  std::size_t iterations;
  double residual;  // last L1 change of the cell masses
};

// Stationary density of the averaged transfer operator by Ulam's method: uniform grid snapped to
// the Markov partition points of every map, power iteration from the uniform density.
// Throws NumericalError (carrying the residual) when max_iter is reached.
UlamResult ulam_stationary(const RandomSystem& system, const UlamOptions& opts = {});

// Uniform grid on X with the nearest node moved onto each of `snap` (ends kept).
std::vector<double> snapped_grid(const Interval& x, std::size_t cells, std::span<const double> snap);

// Stationary density of the golden-ratio random beta-transformation (greedy with probability p1,
// lazy with 1 - p1) on [0, beta]: (1/(3-beta)) (p1 beta, 1, (1-p1) beta) on the cells
// [0,1/beta), [1/beta,1), [1,beta].
PiecewiseConstantDensity golden_density(double p1);

}  // namespace rcycles
