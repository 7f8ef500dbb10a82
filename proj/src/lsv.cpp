#include "rcycles/lsv.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rcycles {

RandomSystem build_lsv_system(std::span<const double> alphas, std::vector<double> p) {
  if (alphas.empty()) throw DomainError("at least one alpha is required");
  std::vector<MarkovMap> maps;
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("alpha must be positive");
    maps.push_back(lsv_map(a));
  }
  return RandomSystem(std::move(maps), std::move(p));
}

ReturnTimeTail return_time_tail(const MarkovMap& map, std::size_t branch_index, std::size_t n_max) {
  const Branch& br = map.branch(branch_index);
  if (!std::holds_alternative<LsvLeft>(br.formula())) throw DomainError("branch is not an L-S-V left branch");
  if (n_max < 10) throw DomainError("n_max must be at least 10");
  ReturnTimeTail out;
  out.tail.reserve(n_max);
  double x = br.domain().hi();
  for (std::size_t k = 1; k <= n_max; ++k) {
    const double next = br.inverse(x);
    if (!(next < x) || !(next > 0.0)) {
      std::ostringstream os;
      os << "preimage sequence stopped decreasing at step " << k;
      throw NumericalError(os.str());
    }
    x = next;
    out.tail.push_back(x);
  }
  const std::size_t lo = std::max<std::size_t>(1, n_max / 10);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  double m = 0.0;
  for (std::size_t n = lo; n <= n_max; ++n) {
    const double lx = std::log(static_cast<double>(n));
    const double ly = std::log(out.tail[n - 1]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    m += 1.0;
  }
  out.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return out;
}

LsvCase classify_case(std::span<const double> alphas) {
  if (alphas.empty()) return LsvCase::unresolved;
  const auto [mn, mx] = std::minmax_element(alphas.begin(), alphas.end());
  if (*mx < 1.0) return LsvCase::c;
  if (*mn >= 1.0) return LsvCase::b;
  return LsvCase::unresolved;
}

const char* to_string(LsvCase c) {
  switch (c) {
    case LsvCase::b: return "b";
    case LsvCase::c: return "c";
    default: return "unresolved";
  }
}

NeutralProfile neutral_mass_profile(const CycleSet& set, std::span<const double> eps) {
  static const std::vector<double> kDefault{0.01, 0.05, 0.1};
  NeutralProfile out;
  out.eps.assign(eps.begin(), eps.end());
  if (out.eps.empty()) out.eps = kDefault;
  const WeightedPointMeasure xi = cycle_measure_xi(set);
  for (double e : out.eps) out.mass.push_back(xi.cdf_below(e));
  for (const Cycle& c : set.cycles) {
    if (std::abs(c.point) <= 1e-12) out.neutral_weight = set.weight(c);
  }
  return out;
}

NeutralProfile neutral_mass_profile(const CodedSystem& cs, std::span<const int> omega, const CycleOptions& opts) {
  return neutral_mass_profile(enumerate_cycles(cs, omega, opts));
}

}  // namespace rcycles
