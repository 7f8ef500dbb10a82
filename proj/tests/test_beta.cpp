#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "rcycles/beta.hpp"

using namespace rcycles;

namespace {

BetaSystem golden(double p1 = 0.7) { return build_beta_system(golden_ratio(), {p1, 1.0 - p1}); }

// Root of beta^3 = beta^2 + beta + 1; the greedy expansion of 1 is 111.
double tribonacci() {
  double b = 1.8;
  for (int k = 0; k < 100; ++k) b = b - (b * b * b - b * b - b - 1.0) / (3 * b * b - 2 * b - 1.0);
  return b;
}

}  // namespace

TEST(Build, GoldenPartitionAndOrbit) {
  const BetaSystem bs = golden();
  const double b = golden_ratio();
  ASSERT_EQ(bs.partition.size(), 4u);
  EXPECT_NEAR(bs.partition[1], 1.0 / b, 1e-12);
  EXPECT_NEAR(bs.partition[2], 1.0, 1e-15);
  EXPECT_NEAR(bs.partition[3], b, 1e-12);
  ASSERT_EQ(bs.greedy_orbit_of_1.size(), 3u);
  EXPECT_NEAR(bs.greedy_orbit_of_1[1], 1.0 / b, 1e-12);
  EXPECT_EQ(bs.greedy_orbit_of_1[2], 0.0);
  EXPECT_EQ(bs.max_digit, 1);
}

TEST(Build, ThreeBranchesOfSlopeBeta) {
  const BetaSystem bs = golden();
  for (const MarkovMap& m : bs.coded.system.maps()) {
    ASSERT_EQ(m.size(), 3u);
    for (const Branch& br : m.branches()) EXPECT_NEAR(br.derivative(br.domain().midpoint()), golden_ratio(), 1e-15);
  }
}

TEST(Build, LazyMatchesDirectFormula) {
  const MarkovMap lazy = beta_lazy_map(golden_ratio());
  for (int k = 0; k <= 1000; ++k) {
    const double x = golden_ratio() * k / 1000.0;
    EXPECT_NEAR(lazy.evaluate(x).value, oracle::golden_lazy(x), 1e-12);
  }
}

TEST(Build, InfiniteExpansionRejected) {
  EXPECT_THROW(build_beta_system(std::sqrt(2.0), {0.5, 0.5}, 3), MarkovError);
  EXPECT_THROW(build_beta_system(2.0), DomainError);
  EXPECT_THROW(build_beta_system(0.9), DomainError);
}

TEST(Build, OtherBetaWithFiniteExpansion) {
  const BetaSystem bs = build_beta_system(tribonacci());
  EXPECT_EQ(bs.greedy_orbit_of_1.back(), 0.0);
  EXPECT_GT(bs.partition.size(), 4u);
  EXPECT_TRUE(mixing_index(bs.coded.matrix, 64).has_value());
}

TEST(Property, LazyIsConjugateOfGreedy) {
  for (double b : {golden_ratio(), tribonacci()}) {
    const BetaSystem bs = build_beta_system(b);
    const MarkovMap& g = bs.coded.system.map(0);
    const MarkovMap& l = bs.coded.system.map(1);
    for (int k = 0; k <= 2000; ++k) {
      const double x = bs.x_hi() * k / 2000.0;
      bool on_cut = false;
      for (double p : bs.partition) on_cut = on_cut || std::abs(p - x) < 1e-9;
      if (on_cut) continue;
      EXPECT_NEAR(l.evaluate(x).value, bs.reflect(g.evaluate(bs.reflect(x)).value), 1e-10);
    }
  }
}

TEST(Digits, InverseBetaExpansion) {
  const BetaSystem bs = golden();
  const DigitSequence ds = digit_sequence(bs, SampleWord(6, 0), 1.0 / golden_ratio());
  EXPECT_EQ(ds.digits, (std::vector<int>{1, 0, 0, 0, 0, 0}));
}

TEST(Digits, ZeroCycleHasZeroDigits) {
  const BetaSystem bs = golden();
  const CycleSet s = enumerate_cycles(bs.coded, SampleWord(8, 0));
  ASSERT_EQ(s.cycles.front().point, 0.0);
  const DigitSequence ds = digit_sequence(bs, s.cycles.front(), s.omega);
  EXPECT_EQ(ds.digits, std::vector<int>(8, 0));
}

TEST(Digits, ReconstructionOfCycles) {
  const BetaSystem bs = golden();
  const double b = bs.beta;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SampleWord omega = sample_word(bs.coded.system.p(), 10, seed);
    const CycleSet s = enumerate_cycles(bs.coded, omega);
    for (const Cycle& c : s.cycles) {
      const DigitSequence ds = digit_sequence(bs, c, omega);
      // T_omega^n x = x for a cycle.
      EXPECT_NEAR(reconstruct(b, ds.digits, c.point), c.point, 1e-9);
      const DigitSequence direct = digit_sequence(bs, omega, c.point);
      EXPECT_NEAR(reconstruct(b, direct.digits, bs.coded.system.compose(omega, c.point)), c.point, 1e-9);
      for (std::size_t k = 0; k < c.orbit.size(); ++k) {
        const int e = omega[k] == 0 ? greedy_digit(b, c.orbit[k]) : lazy_digit(b, c.orbit[k]);
        EXPECT_EQ(ds.digits[k], e);
      }
    }
  }
}

TEST(Stats, Examples) {
  const DigitStats s = digit_stats(std::vector<int>{1, 0, 1}, 1);
  EXPECT_NEAR(s.freq[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.freq[1], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.symmetric_mean, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.mean_distance, 2.0 / 3.0, 1e-15);
  const DigitStats c = digit_stats(std::vector<int>(9, 2), 2);
  EXPECT_NEAR(c.symmetric_mean, 4.0, 1e-15);
  EXPECT_EQ(c.mean_distance, 0.0);
  const DigitStats z = digit_stats(std::vector<int>(5, 0), 1);
  EXPECT_EQ(z.symmetric_mean, 0.0);
  EXPECT_EQ(z.mean_distance, 0.0);
  EXPECT_THROW(digit_stats(std::vector<int>{1}, 1), DomainError);
}

TEST(Stats, MatchesPairwiseDefinition) {
  const std::vector<int> d{0, 2, 1, 1, 0, 2, 2, 1, 0, 0, 1};
  double s = 0.0, dist = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j) {
      s += d[i] * d[j];
      dist += std::abs(d[i] - d[j]);
    }
  const double pairs = d.size() * (d.size() - 1) / 2.0;
  const DigitStats st = digit_stats(d, 2);
  EXPECT_NEAR(st.symmetric_mean, s / pairs, 1e-14);
  EXPECT_NEAR(st.mean_distance, dist / pairs, 1e-14);
}

TEST(Q, ClosedForm) {
  auto q = q_closed_form_golden(0.5);
  EXPECT_NEAR(q[0], 0.5, 1e-15);
  q = q_closed_form_golden(0.7);
  EXPECT_NEAR(q[0], 0.5894427, 1e-7);
  EXPECT_NEAR(q[1], 0.4105573, 1e-7);
  EXPECT_NEAR(q[0] + q[1], 1.0, 1e-15);
  q = q_closed_form_golden(1.0);
  EXPECT_NEAR(q[0], (5.0 + std::sqrt(5.0)) / 10.0, 1e-15);
  const auto parry = golden_density(1.0);
  EXPECT_NEAR(q[0], parry.integral(0.0, 1.0 / golden_ratio()), 1e-12);
}

TEST(Q, FromDensity) {
  const BetaSystem bs = golden();
  const auto q = q_from_density(bs, bs.coded.system.p(), golden_density(0.7));
  EXPECT_NEAR(q[0], 0.5894427191, 1e-10);
  EXPECT_NEAR(q[0], q_closed_form_golden(0.7)[0], 1e-12);
  EXPECT_NEAR(q[1], q_closed_form_golden(0.7)[1], 1e-12);
  const BetaSystem half = golden(0.5);
  const auto qs = q_from_density(half, half.coded.system.p(), golden_density(0.5));
  EXPECT_NEAR(qs[0], 0.5, 1e-12);
  const PiecewiseConstantDensity lumpy({0.0, 0.4, 1.1, golden_ratio()}, {3.0, 0.5, 1.0});
  const auto ql = q_from_density(bs, bs.coded.system.p(), lumpy);
  EXPECT_NEAR(ql[0] + ql[1], 1.0, 1e-12);
}

TEST(Limits, GoldenTargets) {
  const auto q = q_closed_form_golden(0.7);
  EXPECT_NEAR(symmetric_mean_limit(q), 0.1685573, 1e-7);
  // Two digits: the pairwise sum reduces to 2 q0 q1.
  EXPECT_NEAR(mean_distance_limit(q), 2.0 * q[0] * q[1], 1e-14);
  EXPECT_NEAR(mean_distance_limit(q), 0.4840043, 1e-5);
}

TEST(Limits, DigitDifferencesApproachConvolution) {
  const BetaSystem bs = golden();
  const auto target = digit_difference_limit(q_closed_form_golden(0.7));
  std::vector<double> avg(target.size(), 0.0);
  const int seeds = 3;
  for (int s = 1; s <= seeds; ++s) {
    const auto digits = random_orbit_digits(bs, s, 1000000, 0.3);
    const auto emp = digit_difference_distribution(digits, 1);
    for (std::size_t k = 0; k < avg.size(); ++k) avg[k] += emp[k] / seeds;
  }
  double dist = 0.0;
  for (std::size_t k = 0; k < avg.size(); ++k) dist = std::max(dist, std::abs(avg[k] - target[k]));
  EXPECT_LE(dist, 0.02);
}
