#include <gtest/gtest.h>

#include <cmath>

#include "rcycles/lsv.hpp"

using namespace rcycles;

TEST(Build, FormulaAndFullBranches) {
  const std::vector<double> a{1.0};
  const RandomSystem s = build_lsv_system(a, {1.0});
  EXPECT_NEAR(s.compose(SampleWord{0}, 0.25), 0.375, 1e-15);
  const std::vector<double> two{0.4, 2.2};
  const CodedSystem cs = build_alphabet_and_matrix(build_lsv_system(two, {0.5, 0.5}));
  EXPECT_TRUE(cs.matrix.all_positive());
  EXPECT_NEAR(pelikan_index(cs.system), 1.0, 1e-15);
  for (const MarkovMap& m : cs.system.maps()) {
    EXPECT_EQ(m.branch(0).derivative(0.0), 1.0);
    EXPECT_TRUE(validate_markov(m).passed);
  }
}

TEST(Build, RejectsBadAlpha) {
  const std::vector<double> bad{0.5, 0.0};
  EXPECT_THROW(build_lsv_system(bad, {0.5, 0.5}), DomainError);
  const std::vector<double> none;
  EXPECT_THROW(build_lsv_system(none, {}), DomainError);
}

TEST(Tail, ExponentsNearMinusOneOverAlpha) {
  const std::vector<std::pair<double, double>> cases{{1.0, 0.2}, {0.5, 0.3}, {2.0, 0.2}};
  for (const auto& [alpha, tol] : cases) {
    const ReturnTimeTail t = return_time_tail(lsv_map(alpha), 0, 1000);
    EXPECT_NEAR(t.exponent, -1.0 / alpha, tol) << "alpha " << alpha;
  }
}

TEST(Tail, StrictlyDecreasingAndPositive) {
  const ReturnTimeTail t = return_time_tail(lsv_map(0.7), 0, 1000);
  ASSERT_EQ(t.tail.size(), 1000u);
  EXPECT_LT(t.tail[0], 0.5);
  for (std::size_t k = 1; k < t.tail.size(); ++k) {
    EXPECT_LT(t.tail[k], t.tail[k - 1]);
    EXPECT_GT(t.tail[k], 0.0);
  }
}

TEST(Tail, WrongBranchRejected) {
  EXPECT_THROW(return_time_tail(lsv_map(1.0), 1, 1000), DomainError);
  EXPECT_THROW(return_time_tail(doubling_map(), 0, 1000), DomainError);
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify_case(std::vector<double>{0.3, 0.6}), LsvCase::c);
  EXPECT_EQ(classify_case(std::vector<double>{1.5, 2.0}), LsvCase::b);
  EXPECT_EQ(classify_case(std::vector<double>{0.5, 2.0}), LsvCase::unresolved);
  EXPECT_EQ(classify_case(std::vector<double>{1.0}), LsvCase::b);
  EXPECT_STREQ(to_string(LsvCase::unresolved), "unresolved");
}

TEST(Classify, ConsistentWithTails) {
  for (const std::vector<double>& alphas : {std::vector<double>{0.3, 0.6}, std::vector<double>{1.5, 2.0}}) {
    const double a_min = *std::min_element(alphas.begin(), alphas.end());
    const ReturnTimeTail t = return_time_tail(lsv_map(a_min), 0, 1000);
    EXPECT_LE(std::abs(1.0 / a_min - std::abs(t.exponent)), 0.3);
    // Integrable tail (|exponent| > 1) exactly in case c.
    EXPECT_EQ(std::abs(t.exponent) > 1.0, classify_case(alphas) == LsvCase::c);
  }
}

TEST(Profile, NeutralCycleWeightOne) {
  const std::vector<double> a{0.5, 1.5};
  const CodedSystem cs = build_alphabet_and_matrix(build_lsv_system(a, {0.5, 0.5}));
  const SampleWord omega = sample_word(cs.system.p(), 10, 3);
  const CycleSet s = enumerate_cycles(cs, omega);
  ASSERT_EQ(s.cycles.front().point, 0.0);
  EXPECT_EQ(s.cycles.front().log_weight, 0.0);
  const NeutralProfile pr = neutral_mass_profile(s);
  EXPECT_NEAR(pr.neutral_weight, 1.0 / s.z(), 1e-12);
  ASSERT_EQ(pr.mass.size(), 3u);
  EXPECT_LE(pr.mass[0], pr.mass[1]);
  EXPECT_LE(pr.mass[1], pr.mass[2]);
  EXPECT_GE(pr.mass[0], pr.neutral_weight - 1e-12);
}

TEST(Profile, DoublingControlNearLebesgue) {
  const CodedSystem cs = build_alphabet_and_matrix(RandomSystem({doubling_map()}, {1.0}, true));
  const NeutralProfile pr = neutral_mass_profile(cs, SampleWord(12, 0));
  for (std::size_t k = 0; k < pr.eps.size(); ++k) EXPECT_NEAR(pr.mass[k], pr.eps[k], 1e-3);
}
