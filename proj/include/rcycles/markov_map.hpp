#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rcycles/interval.hpp"

namespace rcycles {

// y = slope * x + intercept
struct Affine {
  double slope;
  double intercept;
};

// Left branch of the Liverani-Saussol-Vaienti map: y = x (1 + 2^alpha x^alpha).
struct LsvLeft {
  double alpha;
};

// y = beta * x - offset. The offset is the digit emitted by the branch.
struct BetaPiece {
  double beta;
  int offset;
};

using BranchFormula = std::variant<Affine, LsvLeft, BetaPiece>;

// One monotone C^1 piece of a Markov map. Derivatives are exact for every formula kind.
class Branch {
 public:
  Branch(Interval domain, BranchFormula formula, int label);

  const Interval& domain() const noexcept { return domain_; }
  const BranchFormula& formula() const noexcept { return formula_; }
  int label() const noexcept { return label_; }

  double value(double x) const noexcept;
  double derivative(double x) const noexcept;
  bool increasing() const noexcept;

  // Closure of the branch image.
  Interval image() const;

  // Inverse branch at y, for y in image() (clamped). Closed form for affine and beta pieces,
  // bisection to 1e-14 for the L-S-V left branch.
  double inverse(double y) const;

 private:
  Interval domain_;
  BranchFormula formula_;
  int label_;
};

// Interval map with finitely many ordered branches. Branch domains are [lo, hi) except the last,
// which is closed; the map is immutable after construction.
class MarkovMap {
 public:
  struct Evaluation {
    double value;
    double derivative;
    int label;
  };

  // Branches must be ordered, with closures tiling `ambient` (gaps/overlaps up to 1e-12).
  // `exceptional` lists the declared points where |T'| <= 1 is allowed.
  MarkovMap(Interval ambient, std::vector<Branch> branches, std::vector<double> exceptional = {});

  const Interval& ambient() const noexcept { return ambient_; }
  std::span<const Branch> branches() const noexcept { return branches_; }
  const Branch& branch(std::size_t i) const { return branches_.at(i); }
  std::size_t size() const noexcept { return branches_.size(); }
  std::span<const double> exceptional_set() const noexcept { return exceptional_; }

  // Cell boundaries: ambient.lo, every interior cut, ambient.hi.
  std::vector<double> partition_points() const;

  // Index of the branch whose domain holds x. Points within 1e-12 outside X are clamped;
  // anything farther throws DomainError.
  std::size_t branch_index(double x) const;

  Evaluation evaluate(double x) const;

 private:
  Interval ambient_;
  std::vector<Branch> branches_;
  std::vector<double> exceptional_;
};

struct BranchCoverage {
  int label;
  Interval image;
  std::vector<std::size_t> covered_cells;  // cells whose interior meets the image
  double endpoint_mismatch;                // worst distance of an image endpoint to a partition point
  bool ok;
};

struct ValidationReport {
  bool passed = true;
  std::vector<BranchCoverage> branches;
  std::vector<double> non_expanding_points;  // sampled points with |T'| <= 1
  std::vector<std::string> failures;
  double max_endpoint_mismatch = 0.0;
};

// Checks the Markov property (branch images are unions of cells, image endpoints on partition
// points) and non-uniform expansion on a sampled grid.
ValidationReport validate_markov(const MarkovMap& map, double tol = 1e-9);

// Map builders.
MarkovMap doubling_map();
// Affine branches on the cells [breakpoints[k], breakpoints[k+1]].
MarkovMap affine_markov_map(std::span<const double> breakpoints, std::span<const double> slopes,
                            std::span<const double> intercepts);
// L_alpha on [0,1]: x(1 + 2^alpha x^alpha) on [0,1/2), 2x-1 on [1/2,1]; exceptional set {0}.
MarkovMap lsv_map(double alpha);

}  // namespace rcycles
