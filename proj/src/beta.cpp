#include "rcycles/beta.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rcycles {
namespace {

constexpr double kSnap = 1e-9;

struct BetaPartition {
  double beta;
  int max_digit;
  double x_hi;
  std::vector<double> orbit_of_1;
  std::vector<double> points;
};

void insert_point(std::vector<double>& pts, double x, bool& added) {
  for (double p : pts) {
    if (std::abs(p - x) <= kSnap) return;
  }
  pts.push_back(x);
  added = true;
}

BetaPartition beta_partition(double beta, int depth_bound) {
  if (!(beta > 1.0) || !std::isfinite(beta)) throw DomainError("beta must be > 1");
  if (std::abs(beta - std::round(beta)) < 1e-12) throw DomainError("beta must not be an integer");
  if (depth_bound < 1) throw DomainError("depth bound must be positive");
  BetaPartition bp{beta, static_cast<int>(std::floor(beta)), 0.0, {}, {}};
  bp.x_hi = bp.max_digit / (beta - 1.0);

  // Greedy orbit of 1 must reach 0.
  double x = 1.0;
  bp.orbit_of_1.push_back(x);
  bool finite = false;
  for (int k = 0; k < depth_bound; ++k) {
    x = beta * x - greedy_digit(beta, x);
    if (std::abs(x) <= kSnap) {
      bp.orbit_of_1.push_back(0.0);
      finite = true;
      break;
    }
    bp.orbit_of_1.push_back(x);
  }
  if (!finite) {
    std::ostringstream os;
    os << "greedy expansion of 1 not finite (to depth " << depth_bound << ") for beta = " << beta;
    throw MarkovError(os.str());
  }

  std::vector<double> pts{0.0, bp.x_hi, 1.0};
  bool added = false;
  for (int k = 1; k <= bp.max_digit; ++k) insert_point(pts, k / beta, added);
  for (double o : bp.orbit_of_1) insert_point(pts, o, added);
  const std::size_t seeds = pts.size();
  for (std::size_t i = 0; i < seeds; ++i) insert_point(pts, bp.x_hi - pts[i], added);

  // Close the set under both maps, taking both one-sided values at every point, so every
  // branch image ends on a partition point.
  auto greedy_cut = [&](double v) { return std::abs(v * beta - std::round(v * beta)) <= kSnap; };
  for (int round = 0;; ++round) {
    if (round > depth_bound) throw MarkovError("beta partition did not close within the depth bound");
    added = false;
    const std::vector<double> snapshot = pts;
    for (double s : snapshot) {
      std::vector<double> images;
      const int e1 = greedy_digit(beta, s);
      images.push_back(beta * s - e1);
      if (greedy_cut(s) && e1 > 0) images.push_back(beta * s - (e1 - 1));
      const int e2 = lazy_digit(beta, s);
      images.push_back(beta * s - e2);
      if (greedy_cut(bp.x_hi - s)) {
        // Lazy map is continuous from the right of its cuts; take the other side as well.
        if (e2 + 1 <= bp.max_digit) images.push_back(beta * s - (e2 + 1));
        if (e2 - 1 >= 0) images.push_back(beta * s - (e2 - 1));
      }
      for (double y : images) {
        if (y < -kSnap || y > bp.x_hi + kSnap) continue;
        insert_point(pts, std::clamp(y, 0.0, bp.x_hi), added);
        insert_point(pts, bp.x_hi - std::clamp(y, 0.0, bp.x_hi), added);
      }
    }
    if (!added) break;
  }
  std::sort(pts.begin(), pts.end());
  pts.front() = 0.0;
  pts.back() = bp.x_hi;
  bp.points = std::move(pts);
  return bp;
}

MarkovMap beta_map(const BetaPartition& bp, bool lazy) {
  std::vector<Branch> br;
  for (std::size_t k = 0; k + 1 < bp.points.size(); ++k) {
    const double mid = 0.5 * (bp.points[k] + bp.points[k + 1]);
    const int d = lazy ? lazy_digit(bp.beta, mid) : greedy_digit(bp.beta, mid);
    br.emplace_back(Interval(bp.points[k], bp.points[k + 1]), BetaPiece{bp.beta, d}, static_cast<int>(k) + 1);
  }
  return MarkovMap(Interval(0.0, bp.x_hi), std::move(br));
}

int offset_of(const CodedSystem& cs, int symbol) {
  const Symbol& s = cs.alphabet[static_cast<std::size_t>(symbol)];
  const Branch& br = cs.system.map(static_cast<std::size_t>(s.map)).branch(static_cast<std::size_t>(s.branch));
  const auto* piece = std::get_if<BetaPiece>(&br.formula());
  if (!piece) throw DomainError("digits need beta_piece branches");
  return piece->offset;
}

}  // namespace

double golden_ratio() { return 0.5 * (1.0 + std::sqrt(5.0)); }

int greedy_digit(double beta, double x) {
  const int m = static_cast<int>(std::floor(beta));
  if (x >= m / beta) return m;
  return std::clamp(static_cast<int>(std::floor(beta * x)), 0, m);
}

int lazy_digit(double beta, double x) {
  const int m = static_cast<int>(std::floor(beta));
  return m - greedy_digit(beta, m / (beta - 1.0) - x);
}

BetaSystem build_beta_system(double beta, std::vector<double> p, int depth_bound) {
  BetaPartition bp = beta_partition(beta, depth_bound);
  RandomSystem sys({beta_map(bp, false), beta_map(bp, true)}, std::move(p));
  return BetaSystem{beta, bp.max_digit, std::move(bp.orbit_of_1), bp.points, build_alphabet_and_matrix(std::move(sys))};
}

MarkovMap beta_greedy_map(double beta, int depth_bound) { return beta_map(beta_partition(beta, depth_bound), false); }

MarkovMap beta_lazy_map(double beta, int depth_bound) { return beta_map(beta_partition(beta, depth_bound), true); }

DigitSequence digit_sequence(const BetaSystem& bs, const Cycle& cycle, std::span<const int> omega) {
  DigitSequence ds{{}, SampleWord(omega.begin(), omega.end()), cycle.point};
  ds.digits.reserve(cycle.word.size());
  for (int a : cycle.word) ds.digits.push_back(offset_of(bs.coded, a));
  return ds;
}

DigitSequence digit_sequence(const BetaSystem& bs, std::span<const int> omega, double x) {
  DigitSequence ds{{}, SampleWord(omega.begin(), omega.end()), x};
  for (int letter : omega) {
    const MarkovMap& m = bs.coded.system.map(static_cast<std::size_t>(letter));
    const Branch& br = m.branch(m.branch_index(x));
    ds.digits.push_back(std::get<BetaPiece>(br.formula()).offset);
    x = br.value(bs.coded.system.ambient().clamp(x));
  }
  return ds;
}

double reconstruct(double beta, std::span<const int> digits, double tail) {
  double v = tail;
  for (std::size_t k = digits.size(); k-- > 0;) v = (digits[k] + v) / beta;
  return v;
}

DigitStats digit_stats(std::span<const int> digits, int max_digit) {
  const std::size_t n = digits.size();
  if (n < 2) throw DomainError("digit statistics need at least two digits");
  std::vector<double> counts(static_cast<std::size_t>(max_digit) + 1, 0.0);
  for (int d : digits) {
    if (d < 0 || d > max_digit) throw DomainError("digit out of range");
    counts[static_cast<std::size_t>(d)] += 1.0;
  }
  DigitStats st;
  const double nn = static_cast<double>(n);
  const double pairs = nn * (nn - 1.0);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t d = 0; d < counts.size(); ++d) {
    st.freq.push_back(counts[d] / nn);
    sum += static_cast<double>(d) * counts[d];
    sum_sq += static_cast<double>(d * d) * counts[d];
  }
  st.symmetric_mean = (sum * sum - sum_sq) / pairs;
  double dist = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = i + 1; j < counts.size(); ++j) dist += static_cast<double>(j - i) * counts[i] * counts[j];
  }
  st.mean_distance = 2.0 * dist / pairs;
  return st;
}

std::vector<double> q_closed_form_golden(double p1) {
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw DomainError("p1 must lie in [0, 1]");
  const double s5 = std::sqrt(5.0);
  const double q0 = 0.5 * (1.0 + (2.0 * p1 - 1.0) / s5);
  const double q1 = 0.5 * (1.0 + (2.0 * (1.0 - p1) - 1.0) / s5);
  return {q0, q1};
}

std::vector<double> q_from_density(const BetaSystem& bs, std::span<const double> p,
                                   const PiecewiseConstantDensity& density) {
  if (p.size() != 2) throw DomainError("the random beta-transformation has two maps");
  const int m = bs.max_digit;
  const double beta = bs.beta;
  const double hi = bs.x_hi();
  auto cell = [&](int i) -> std::pair<double, double> {
    if (i < m) return {i / beta, (i + 1) / beta};
    return {m / beta, hi};
  };
  std::vector<double> q(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) {
    const auto [a, b] = cell(i);
    const auto [c, d] = cell(m - i);
    q[static_cast<std::size_t>(i)] = p[0] * density.integral(a, b) + p[1] * density.integral(hi - d, hi - c);
  }
  return q;
}

double symmetric_mean_limit(std::span<const double> q) {
  double mean = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) mean += static_cast<double>(i) * q[i];
  return mean * mean;
}

double mean_distance_limit(std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = i + 1; j < q.size(); ++j) s += static_cast<double>(j - i) * q[i] * q[j];
  }
  return 2.0 * s;
}

std::vector<double> digit_difference_distribution(std::span<const int> digits, int max_digit) {
  if (digits.empty()) throw DomainError("empty digit block");
  std::vector<double> counts(static_cast<std::size_t>(max_digit) + 1, 0.0);
  for (int d : digits) counts.at(static_cast<std::size_t>(d)) += 1.0;
  const double n = static_cast<double>(digits.size());
  for (double& c : counts) c /= n;
  return digit_difference_limit(counts);
}

std::vector<double> digit_difference_limit(std::span<const double> q) {
  const std::size_t m = q.size() - 1;
  std::vector<double> out(2 * m + 1, 0.0);
  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = 0; j <= m; ++j) out[i + m - j] += q[i] * q[j];
  }
  return out;
}

std::vector<int> random_orbit_digits(const BetaSystem& bs, std::uint64_t seed, std::size_t length, double x0) {
  SampleStream stream(bs.coded.system.p(), seed);
  std::vector<int> digits;
  digits.reserve(length);
  double x = x0;
  for (std::size_t k = 0; k < length; ++k) {
    const MarkovMap& m = bs.coded.system.map(static_cast<std::size_t>(stream.next()));
    const Branch& br = m.branch(m.branch_index(x));
    digits.push_back(std::get<BetaPiece>(br.formula()).offset);
    x = bs.coded.system.ambient().clamp(br.value(x));
  }
  return digits;
}

}  // namespace rcycles
