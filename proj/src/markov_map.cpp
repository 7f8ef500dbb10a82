#include "rcycles/markov_map.hpp"

#include <algorithm>
#include <iterator>
#include <limits>
#include <cmath>
#include <sstream>

namespace rcycles {
namespace {

constexpr double kTilingTol = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double bisect_increasing(const Branch& b, double y) {
  double lo = b.domain().lo();
  double hi = b.domain().hi();
  if (b.value(lo) >= y) return lo;
  if (b.value(hi) <= y) return hi;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (b.value(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double nearest_distance(std::span<const double> sorted, double x) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
  double best = std::numeric_limits<double>::infinity();
  if (it != sorted.end()) best = std::abs(*it - x);
  if (it != sorted.begin()) best = std::min(best, std::abs(*std::prev(it) - x));
  return best;
}

}  // namespace

Branch::Branch(Interval domain, BranchFormula formula, int label)
    : domain_(domain), formula_(formula), label_(label) {
  std::visit(Overloaded{
                 [](const Affine& a) {
                   if (a.slope == 0.0 || !std::isfinite(a.slope) || !std::isfinite(a.intercept)) {
                     throw DomainError("affine branch needs a finite nonzero slope");
                   }
                 },
                 [](const LsvLeft& l) {
                   if (!(l.alpha > 0.0) || !std::isfinite(l.alpha)) throw DomainError("L-S-V alpha must be > 0");
                 },
                 [](const BetaPiece& p) {
                   if (!(p.beta > 1.0) || !std::isfinite(p.beta)) throw DomainError("beta must be > 1");
                 },
             },
             formula_);
}

double Branch::value(double x) const noexcept {
  return std::visit(Overloaded{
                        [x](const Affine& a) { return a.slope * x + a.intercept; },
                        [x](const LsvLeft& l) { return x * (1.0 + std::pow(2.0 * x, l.alpha)); },
                        [x](const BetaPiece& p) { return p.beta * x - p.offset; },
                    },
                    formula_);
}

double Branch::derivative(double x) const noexcept {
  return std::visit(Overloaded{
                        [](const Affine& a) { return a.slope; },
                        [x](const LsvLeft& l) { return 1.0 + (l.alpha + 1.0) * std::pow(2.0 * x, l.alpha); },
                        [](const BetaPiece& p) { return p.beta; },
                    },
                    formula_);
}

bool Branch::increasing() const noexcept {
  if (const auto* a = std::get_if<Affine>(&formula_)) return a->slope > 0.0;
  return true;
}

Interval Branch::image() const {
  const double a = value(domain_.lo());
  const double b = value(domain_.hi());
  return increasing() ? Interval(a, b) : Interval(b, a);
}

double Branch::inverse(double y) const {
  const Interval img = image();
  y = img.clamp(y);
  const double x = std::visit(Overloaded{
                                  [y](const Affine& a) { return (y - a.intercept) / a.slope; },
                                  [this, y](const LsvLeft&) { return bisect_increasing(*this, y); },
                                  [y](const BetaPiece& p) { return (y + p.offset) / p.beta; },
                              },
                              formula_);
  return domain_.clamp(x);
}

MarkovMap::MarkovMap(Interval ambient, std::vector<Branch> branches, std::vector<double> exceptional)
    : ambient_(ambient), branches_(std::move(branches)), exceptional_(std::move(exceptional)) {
  if (branches_.empty()) throw MarkovError("Markov map needs at least one branch");
  if (std::abs(branches_.front().domain().lo() - ambient_.lo()) > kTilingTol ||
      std::abs(branches_.back().domain().hi() - ambient_.hi()) > kTilingTol) {
    throw MarkovError("branch domains do not reach the ends of the ambient interval");
  }
  for (std::size_t k = 0; k + 1 < branches_.size(); ++k) {
    if (std::abs(branches_[k].domain().hi() - branches_[k + 1].domain().lo()) > kTilingTol) {
      std::ostringstream os;
      os << "branch domains " << k + 1 << " and " << k + 2 << " leave a gap or overlap";
      throw MarkovError(os.str());
    }
  }
  std::sort(exceptional_.begin(), exceptional_.end());
}

std::vector<double> MarkovMap::partition_points() const {
  std::vector<double> pts;
  pts.reserve(branches_.size() + 1);
  pts.push_back(ambient_.lo());
  for (std::size_t k = 1; k < branches_.size(); ++k) pts.push_back(branches_[k].domain().lo());
  pts.push_back(ambient_.hi());
  return pts;
}

std::size_t MarkovMap::branch_index(double x) const {
  if (!ambient_.contains(x, kTilingTol) || std::isnan(x)) {
    std::ostringstream os;
    os.precision(17);
    os << "point " << x << " outside [" << ambient_.lo() << ", " << ambient_.hi() << "]";
    throw DomainError(os.str());
  }
  x = ambient_.clamp(x);
  auto it = std::upper_bound(branches_.begin(), branches_.end(), x,
                             [](double v, const Branch& b) { return v < b.domain().lo(); });
  if (it == branches_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(branches_.begin(), it)) - 1;
}

MarkovMap::Evaluation MarkovMap::evaluate(double x) const {
  const std::size_t k = branch_index(x);
  x = ambient_.clamp(x);
  const Branch& b = branches_[k];
  return {b.value(x), b.derivative(x), b.label()};
}

ValidationReport validate_markov(const MarkovMap& map, double tol) {
  ValidationReport report;
  const std::vector<double> pts = map.partition_points();
  const Interval& X = map.ambient();

  for (const Branch& b : map.branches()) {
    const Interval img = b.image();
    BranchCoverage cov{b.label(), img, {}, 0.0, true};
    cov.endpoint_mismatch = std::max(nearest_distance(pts, img.lo()), nearest_distance(pts, img.hi()));
    for (std::size_t c = 0; c + 1 < pts.size(); ++c) {
      if (img.overlap(pts[c], pts[c + 1]) > tol) cov.covered_cells.push_back(c);
    }
    if (!X.contains(img, tol)) {
      cov.ok = false;
      std::ostringstream os;
      os.precision(17);
      os << "branch " << b.label() << ": image [" << img.lo() << ", " << img.hi() << "] leaves X";
      report.failures.push_back(os.str());
    }
    if (cov.endpoint_mismatch > tol) {
      cov.ok = false;
      std::ostringstream os;
      os << "branch " << b.label() << ": image endpoint misses the partition by " << cov.endpoint_mismatch;
      report.failures.push_back(os.str());
    }
    report.max_endpoint_mismatch = std::max(report.max_endpoint_mismatch, cov.endpoint_mismatch);
    report.passed = report.passed && cov.ok;
    report.branches.push_back(std::move(cov));

    constexpr int kSamples = 1000;
    const Interval& dom = b.domain();
    for (int s = 0; s <= kSamples; ++s) {
      const double x = dom.lo() + dom.length() * s / kSamples;
      if (std::abs(b.derivative(x)) > 1.0) continue;
      report.non_expanding_points.push_back(x);
      if (nearest_distance(map.exceptional_set(), x) > tol) {
        std::ostringstream os;
        os.precision(17);
        os << "branch " << b.label() << ": |T'(" << x << ")| <= 1 outside the declared exceptional set";
        report.failures.push_back(os.str());
        report.passed = false;
      }
    }
  }
  return report;
}

MarkovMap doubling_map() {
  std::vector<Branch> br{
      Branch(Interval(0.0, 0.5), Affine{2.0, 0.0}, 1),
      Branch(Interval(0.5, 1.0), Affine{2.0, -1.0}, 2),
  };
  return MarkovMap(Interval(0.0, 1.0), std::move(br));
}

MarkovMap affine_markov_map(std::span<const double> breakpoints, std::span<const double> slopes,
                            std::span<const double> intercepts) {
  if (breakpoints.size() < 2 || slopes.size() + 1 != breakpoints.size() || intercepts.size() != slopes.size()) {
    throw DomainError("affine map needs k+1 breakpoints, k slopes and k intercepts");
  }
  std::vector<Branch> br;
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    br.emplace_back(Interval(breakpoints[k], breakpoints[k + 1]), Affine{slopes[k], intercepts[k]},
                    static_cast<int>(k) + 1);
  }
  return MarkovMap(Interval(breakpoints.front(), breakpoints.back()), std::move(br));
}

MarkovMap lsv_map(double alpha) {
  if (!(alpha > 0.0)) throw DomainError("L-S-V alpha must be > 0");
  std::vector<Branch> br{
      Branch(Interval(0.0, 0.5), LsvLeft{alpha}, 1),
      Branch(Interval(0.5, 1.0), Affine{2.0, -1.0}, 2),
  };
  return MarkovMap(Interval(0.0, 1.0), std::move(br), {0.0});
}

}  // namespace rcycles
