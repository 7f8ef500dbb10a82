#include "rcycles/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

namespace rcycles {
namespace {

double golden_beta() { return 0.5 * (1.0 + std::sqrt(5.0)); }

// Sparse row of the Ulam matrix: (target cell, transition probability).
struct UlamEntry {
  std::size_t target;
  double prob;
};

std::size_t cell_of(std::span<const double> grid, double y) {
  auto it = std::upper_bound(grid.begin(), grid.end(), y);
  if (it == grid.begin()) return 0;
  const auto k = static_cast<std::size_t>(std::distance(grid.begin(), it)) - 1;
  return std::min(k, grid.size() - 2);
}

std::vector<UlamEntry> ulam_row(const RandomSystem& system, std::span<const double> grid, std::size_t j) {
  const double lo = grid[j];
  const double hi = grid[j + 1];
  const double len = hi - lo;
  std::vector<UlamEntry> row;
  for (std::size_t i = 0; i < system.size(); ++i) {
    const double pi = system.p()[i];
    for (const Branch& br : system.map(i).branches()) {
      const double a = std::max(lo, br.domain().lo());
      const double b = std::min(hi, br.domain().hi());
      if (!(b > a)) continue;
      double y0 = br.value(a);
      double y1 = br.value(b);
      if (y0 > y1) std::swap(y0, y1);
      const std::size_t k0 = cell_of(grid, y0);
      const std::size_t k1 = cell_of(grid, y1);
      for (std::size_t k = k0; k <= k1; ++k) {
        const double c0 = std::max(grid[k], y0);
        const double c1 = std::min(grid[k + 1], y1);
        if (!(c1 > c0)) continue;
        const double pre = std::abs(br.inverse(c1) - br.inverse(c0));
        if (pre > 0.0) row.push_back({k, pi * pre / len});
      }
    }
  }
  std::sort(row.begin(), row.end(), [](const UlamEntry& x, const UlamEntry& y) { return x.target < y.target; });
  // Merge repeated targets so the row is canonical.
  std::vector<UlamEntry> merged;
  for (const auto& e : row) {
    if (!merged.empty() && merged.back().target == e.target) {
      merged.back().prob += e.prob;
    } else {
      merged.push_back(e);
    }
  }
  return merged;
}

}  // namespace

WeightedPointMeasure WeightedPointMeasure::from_weights(std::vector<Atom> atoms, double merge_tol) {
  std::erase_if(atoms, [](const Atom& a) { return !(a.weight > 0.0); });
  if (atoms.empty()) throw DomainError("measure needs at least one atom with positive weight");
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.point) || !std::isfinite(a.weight)) throw DomainError("non-finite atom");
  }
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.point < y.point; });
  WeightedPointMeasure m;
  for (const Atom& a : atoms) {
    if (!m.atoms_.empty() && a.point - m.atoms_.back().point <= merge_tol) {
      m.atoms_.back().weight += a.weight;
    } else {
      m.atoms_.push_back(a);
    }
  }
  double total = 0.0;
  for (const Atom& a : m.atoms_) total += a.weight;
  m.cumulative_.reserve(m.atoms_.size());
  double run = 0.0;
  for (Atom& a : m.atoms_) {
    a.weight /= total;
    run += a.weight;
    m.cumulative_.push_back(run);
  }
  return m;
}

WeightedPointMeasure WeightedPointMeasure::dirac(double x) { return from_weights({{x, 1.0}}); }

double WeightedPointMeasure::mass() const noexcept { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

double WeightedPointMeasure::cdf(double x) const noexcept {
  auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x, [](double v, const Atom& a) { return v < a.point; });
  if (it == atoms_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(std::distance(atoms_.begin(), it)) - 1];
}

double WeightedPointMeasure::cdf_below(double x) const noexcept {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x, [](const Atom& a, double v) { return a.point < v; });
  if (it == atoms_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(std::distance(atoms_.begin(), it)) - 1];
}

WeightedPointMeasure WeightedPointMeasure::mixture(std::span<const WeightedPointMeasure> parts,
                                                   std::span<const double> weights) {
  if (parts.empty()) throw DomainError("mixture of no measures");
  if (!weights.empty() && weights.size() != parts.size()) throw DomainError("mixture weight count mismatch");
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const double w = weights.empty() ? 1.0 / static_cast<double>(parts.size()) : weights[i];
    for (const Atom& a : parts[i].atoms()) atoms.push_back({a.point, a.weight * w});
  }
  return from_weights(std::move(atoms));
}

PiecewiseConstantDensity::PiecewiseConstantDensity(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.size() < 2 || values_.size() + 1 != breakpoints_.size()) {
    throw DomainError("density needs k+1 breakpoints for k values");
  }
  for (std::size_t k = 0; k + 1 < breakpoints_.size(); ++k) {
    if (!(breakpoints_[k] < breakpoints_[k + 1])) throw DomainError("density breakpoints must increase");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!(values_[k] >= 0.0) || !std::isfinite(values_[k])) throw DomainError("density values must be >= 0");
    total += values_[k] * (breakpoints_[k + 1] - breakpoints_[k]);
  }
  if (!(total > 0.0)) throw DomainError("density has zero mass");
  cumulative_.assign(1, 0.0);
  for (std::size_t k = 0; k < values_.size(); ++k) {
    values_[k] /= total;
    cumulative_.push_back(cumulative_.back() + values_[k] * (breakpoints_[k + 1] - breakpoints_[k]));
  }
}

PiecewiseConstantDensity PiecewiseConstantDensity::uniform(const Interval& x) {
  return PiecewiseConstantDensity({x.lo(), x.hi()}, {1.0});
}

double PiecewiseConstantDensity::value_at(double x) const noexcept {
  if (x < lo() || x > hi()) return 0.0;
  return values_[cell_of(breakpoints_, x)];
}

double PiecewiseConstantDensity::cdf(double x) const noexcept {
  if (x <= lo()) return 0.0;
  if (x >= hi()) return 1.0;
  const std::size_t k = cell_of(breakpoints_, x);
  return std::min(1.0, cumulative_[k] + values_[k] * (x - breakpoints_[k]));
}

double kolmogorov_distance(const WeightedPointMeasure& a, const WeightedPointMeasure& b) {
  double d = 0.0;
  for (const Atom& x : a.atoms()) d = std::max(d, std::abs(a.cdf(x.point) - b.cdf(x.point)));
  for (const Atom& x : b.atoms()) d = std::max(d, std::abs(a.cdf(x.point) - b.cdf(x.point)));
  return d;
}

double kolmogorov_distance(const WeightedPointMeasure& a, const PiecewiseConstantDensity& b) {
  double d = 0.0;
  for (const Atom& x : a.atoms()) {
    const double fb = b.cdf(x.point);
    d = std::max({d, std::abs(a.cdf(x.point) - fb), std::abs(a.cdf_below(x.point) - fb)});
  }
  for (double x : b.breakpoints()) d = std::max(d, std::abs(a.cdf(x) - b.cdf(x)));
  return d;
}

double kolmogorov_distance(const PiecewiseConstantDensity& a, const WeightedPointMeasure& b) {
  return kolmogorov_distance(b, a);
}

double kolmogorov_distance(const PiecewiseConstantDensity& a, const PiecewiseConstantDensity& b) {
  double d = 0.0;
  for (double x : a.breakpoints()) d = std::max(d, std::abs(a.cdf(x) - b.cdf(x)));
  for (double x : b.breakpoints()) d = std::max(d, std::abs(a.cdf(x) - b.cdf(x)));
  return d;
}

double pelikan_index(const RandomSystem& system, std::size_t grid) {
  const Interval& X = system.ambient();
  auto sum_at = [&](double x, bool from_left) {
    double s = 0.0;
    for (std::size_t i = 0; i < system.size(); ++i) {
      const MarkovMap& m = system.map(i);
      const double probe = from_left && x > X.lo() ? std::nextafter(x, X.lo()) : x;
      const Branch& br = m.branch(m.branch_index(probe));
      s += system.p()[i] / std::abs(br.derivative(x));
    }
    return s;
  };
  double sup = 0.0;
  for (std::size_t s = 0; s <= grid; ++s) {
    const double x = X.lo() + X.length() * static_cast<double>(s) / static_cast<double>(grid);
    sup = std::max(sup, sum_at(x, false));
  }
  for (const MarkovMap& m : system.maps()) {
    for (double x : m.partition_points()) sup = std::max({sup, sum_at(x, true), sum_at(x, false)});
  }
  return sup;
}

std::vector<double> snapped_grid(const Interval& x, std::size_t cells, std::span<const double> snap) {
  if (cells < 2) throw DomainError("Ulam grid needs at least 2 cells");
  std::vector<double> grid(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k) {
    grid[k] = x.lo() + x.length() * static_cast<double>(k) / static_cast<double>(cells);
  }
  grid.back() = x.hi();
  const double h = x.length() / static_cast<double>(cells);
  for (double s : snap) {
    if (s <= x.lo() + 1e-12 || s >= x.hi() - 1e-12) continue;
    const auto k = static_cast<std::size_t>(std::llround((s - x.lo()) / h));
    if (k == 0 || k >= cells) continue;
    grid[k] = s;
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(), [](double a, double b) { return b - a < 1e-14; }), grid.end());
  return grid;
}

UlamResult ulam_stationary(const RandomSystem& system, const UlamOptions& opts) {
  std::vector<double> snap;
  for (const MarkovMap& m : system.maps()) {
    for (double s : m.partition_points()) snap.push_back(s);
  }
  const std::vector<double> grid = snapped_grid(system.ambient(), opts.cells, snap);
  const std::size_t n = grid.size() - 1;

  std::vector<std::vector<UlamEntry>> rows(n);
  const unsigned threads = std::max(1u, opts.threads);
  if (threads == 1) {
    for (std::size_t j = 0; j < n; ++j) rows[j] = ulam_row(system, grid, j);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t j = t; j < n; j += threads) rows[j] = ulam_row(system, grid, j);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<double> mass(n);
  for (std::size_t j = 0; j < n; ++j) mass[j] = (grid[j + 1] - grid[j]) / system.ambient().length();
  std::vector<double> next(n);
  double residual = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  while (it < opts.max_iter) {
    ++it;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double mj = mass[j];
      if (mj == 0.0) continue;
      for (const UlamEntry& e : rows[j]) next[e.target] += mj * e.prob;
    }
    const double total = std::accumulate(next.begin(), next.end(), 0.0);
    residual = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      next[k] /= total;
      residual += std::abs(next[k] - mass[k]);
    }
    mass.swap(next);
    if (residual < opts.tol) break;
  }
  if (!(residual < opts.tol)) {
    std::ostringstream os;
    os << "Ulam iteration did not converge after " << it << " steps (L1 residual " << residual << ")";
    throw NumericalError(os.str());
  }
  std::vector<double> values(n);
  for (std::size_t k = 0; k < n; ++k) values[k] = mass[k] / (grid[k + 1] - grid[k]);
  return UlamResult{PiecewiseConstantDensity(grid, std::move(values)), it, residual};
}

PiecewiseConstantDensity golden_density(double p1) {
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw DomainError("p1 must lie in [0, 1]");
  const double beta = golden_beta();
  const double scale = 1.0 / (3.0 - beta);
  return PiecewiseConstantDensity({0.0, 1.0 / beta, 1.0, beta},
                                  {scale * p1 * beta, scale, scale * (1.0 - p1) * beta});
}

}  // namespace rcycles
