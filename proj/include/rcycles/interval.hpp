#pragma once

#include <algorithm>
#include <cmath>

#include "rcycles/error.hpp"

namespace rcycles {

// Nondegenerate closed interval [lo, hi]. Half-open conventions are applied by the owners
// (MarkovMap branch dispatch), never by Interval itself.
class Interval {
 public:
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw DomainError("interval requires finite lo < hi");
    }
  }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double length() const noexcept { return hi_ - lo_; }
  double midpoint() const noexcept { return 0.5 * (lo_ + hi_); }

  bool contains(double x, double tol = 0.0) const noexcept { return x >= lo_ - tol && x <= hi_ + tol; }

  bool contains(const Interval& other, double tol = 0.0) const noexcept {
    return other.lo_ >= lo_ - tol && other.hi_ <= hi_ + tol;
  }

  // Length of the overlap with [a, b]; zero when disjoint.
  double overlap(double a, double b) const noexcept { return std::max(0.0, std::min(hi_, b) - std::max(lo_, a)); }

  double clamp(double x) const noexcept { return std::clamp(x, lo_, hi_); }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double lo_;
  double hi_;
};

}  // namespace rcycles
