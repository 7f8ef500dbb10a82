#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "rcycles/beta.hpp"
#include "rcycles/lsv.hpp"

using namespace rcycles;

namespace {

CodedSystem doubling() { return build_alphabet_and_matrix(RandomSystem({doubling_map()}, {1.0}, true)); }
CodedSystem golden(double p1 = 0.7) { return build_beta_system(golden_ratio(), {p1, 1.0 - p1}).coded; }


}  // namespace

TEST(FindCycle, DoublingOneSeventh) {
  const auto c = find_cycle_in_cylinder(doubling(), SymbolWord{0, 0, 1});
  ASSERT_TRUE(c);
  EXPECT_NEAR(c->point, 1.0 / 7.0, 1e-12);
  EXPECT_NEAR(std::exp(c->log_weight), 1.0 / 8.0, 1e-14);
}

TEST(FindCycle, LsvNeutralPoint) {
  const CodedSystem cs = build_alphabet_and_matrix(RandomSystem({lsv_map(0.8)}, {1.0}));
  const auto c = find_cycle_in_cylinder(cs, SymbolWord{0});
  ASSERT_TRUE(c);
  EXPECT_EQ(c->point, 0.0);
  EXPECT_EQ(c->log_weight, 0.0);
}

TEST(FindCycle, GoldenRightEndpoint) {
  const double b = golden_ratio();
  const auto c = find_cycle_in_cylinder(golden(), SymbolWord{2});
  ASSERT_TRUE(c);
  EXPECT_NEAR(c->point, b, 1e-12);
  EXPECT_NEAR(std::exp(c->log_weight), 1.0 / b, 1e-14);
}

TEST(Enumerate, DoublingPeriodThree) {
  const CycleSet s = enumerate_cycles(doubling(), SampleWord{0, 0, 0});
  ASSERT_EQ(s.cycles.size(), 7u);
  for (std::size_t k = 0; k < 7; ++k) {
    EXPECT_NEAR(s.cycles[k].point, k / 7.0, 1e-12);
    EXPECT_NEAR(std::exp(s.cycles[k].log_weight), 0.125, 1e-15);
  }
  EXPECT_NEAR(s.z(), 7.0 / 8.0, 1e-14);
}

TEST(Enumerate, GoldenGreedyOnlyConstantSlope) {
  const CodedSystem cs = golden();
  const double b = golden_ratio();
  for (std::size_t n = 1; n <= 12; ++n) {
    const CycleSet s = enumerate_cycles(cs, SampleWord(n, 0));
    EXPECT_NEAR(s.z(), s.cycles.size() * std::pow(b, -static_cast<double>(n)), 1e-12);
    for (const Cycle& c : s.cycles) EXPECT_NEAR(c.log_weight, -static_cast<double>(n) * std::log(b), 1e-12);
  }
}

TEST(Enumerate, NonEmptyFromMixingIndex) {
  const CodedSystem cs = golden();
  const int n0 = *mixing_index(cs.matrix, 20);
  for (std::size_t n = n0; n <= 14; ++n) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      EXPECT_FALSE(enumerate_cycles(cs, sample_word(cs.system.p(), n, seed)).cycles.empty());
    }
  }
}

TEST(Enumerate, CycleInvariants) {
  const CodedSystem cs = golden();
  const SampleWord omega = sample_word(cs.system.p(), 10, 3);
  const CycleSet s = enumerate_cycles(cs, omega);
  for (std::size_t i = 0; i < s.cycles.size(); ++i) {
    const Cycle& c = s.cycles[i];
    EXPECT_LE(std::abs(cs.system.compose(omega, c.point) - c.point), 1e-9);
    double lw = 0.0;
    for (std::size_t k = 0; k < c.orbit.size(); ++k) {
      EXPECT_TRUE(cs.alphabet[c.word[k]].cell.contains(c.orbit[k], 1e-12));
      lw -= std::log(std::abs(cs.system.map(omega[k]).branch(cs.alphabet[c.word[k]].branch).derivative(c.orbit[k])));
    }
    EXPECT_NEAR(lw, c.log_weight, 1e-12);
    if (i) EXPECT_GT(s.cycles[i].point - s.cycles[i - 1].point, 1e-9);
  }
}

TEST(Oracle, GoldenMatchesDenseGridScan) {
  const CodedSystem cs = golden();
  for (std::size_t n = 1; n <= 8; ++n) {
    for (std::uint64_t seed : {1u, 42u, 7u}) {
      const SampleWord omega = sample_word(cs.system.p(), n, seed);
      const CycleSet s = enumerate_cycles(cs, omega);
      const auto roots = oracle::golden_fixed_points(omega, n <= 4 ? 1000000 : 200000);
      ASSERT_EQ(roots.size(), s.cycles.size()) << "n " << n << " seed " << seed;
      for (std::size_t k = 0; k < roots.size(); ++k) EXPECT_NEAR(roots[k], s.cycles[k].point, 1e-6);
    }
  }
}

TEST(Property, WeightMatchesFiniteDifference) {
  const CodedSystem cs = golden();
  const SampleWord omega = sample_word(cs.system.p(), 8, 9);
  const CycleSet s = enumerate_cycles(cs, omega);
  for (const Cycle& c : s.cycles) {
    const Interval j = cylinder_interval(cs, c.word);
    const double h = 1e-4 * j.length();
    if (c.point - h < j.lo() || c.point + h > j.hi()) continue;
    auto f = [&](double x) {
      for (int a : c.word) x = cs.system.map(cs.alphabet[a].map).branch(cs.alphabet[a].branch).value(x);
      return x;
    };
    const double fd = oracle::central_difference(f, c.point, h);
    EXPECT_NEAR(std::exp(-c.log_weight) / std::abs(fd), 1.0, 1e-5);
  }
}

TEST(Property, DedupeCountsBoundaryCoincidences) {
  for (const CodedSystem& cs : {golden(), doubling()}) {
    for (std::size_t n = 1; n <= 10; ++n) {
      for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const SampleWord omega = sample_word(cs.system.p(), n, seed);
        CycleOptions raw;
        raw.dedupe = false;
        const CycleSet a = enumerate_cycles(cs, omega);
        const CycleSet b = enumerate_cycles(cs, omega, raw);
        EXPECT_EQ(b.cycles.size() - a.cycles.size(), a.boundary_coincidences);
      }
    }
  }
}

TEST(Property, ThreadCountDoesNotChangeResults) {
  const CodedSystem cs = golden();
  const SampleWord omega = sample_word(cs.system.p(), 16, 42);
  const CycleSet one = enumerate_cycles(cs, omega);
  for (unsigned t : {2u, 3u, 8u}) {
    CycleOptions o;
    o.threads = t;
    const CycleSet many = enumerate_cycles(cs, omega, o);
    ASSERT_EQ(one.cycles.size(), many.cycles.size());
    EXPECT_EQ(one.log_z, many.log_z);
    for (std::size_t k = 0; k < one.cycles.size(); ++k) {
      EXPECT_EQ(one.cycles[k].point, many.cycles[k].point);
      EXPECT_EQ(one.cycles[k].word, many.cycles[k].word);
      EXPECT_EQ(one.cycles[k].log_weight, many.cycles[k].log_weight);
    }
  }
}

TEST(Property, SubExponentialZ) {
  const CodedSystem cs = golden();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const double p8 = pressure_from_cycles(cs, sample_word(cs.system.p(), 8, seed), {}, false).per_sample;
    const double p24 = pressure_from_cycles(cs, sample_word(cs.system.p(), 24, seed), {}, false).per_sample;
    EXPECT_LT(std::abs(p24), std::abs(p8)) << "seed " << seed;
  }
}

TEST(Enumerate, SizeGuard) {
  CycleOptions o;
  o.max_words = 100;
  EXPECT_THROW(enumerate_cycles(golden(), SampleWord(20, 0), o), SizeGuardError);
}

TEST(Measures, XiDoublingUniformOnSevenths) {
  const WeightedPointMeasure xi = cycle_measure_xi(enumerate_cycles(doubling(), SampleWord{0, 0, 0}));
  ASSERT_EQ(xi.size(), 7u);
  for (std::size_t k = 0; k < 7; ++k) {
    EXPECT_NEAR(xi.atoms()[k].point, k / 7.0, 1e-12);
    EXPECT_NEAR(xi.atoms()[k].weight, 3.0 / 21.0, 1e-14);
  }
}

TEST(Measures, SingleCycleIsItsOrbitMeasure) {
  CycleSet s = enumerate_cycles(doubling(), SampleWord{0, 0, 0});
  s.cycles.erase(s.cycles.begin(), s.cycles.begin() + 1);
  s.cycles.resize(1);  // the orbit of 1/7
  s.log_z = s.cycles[0].log_weight;
  const WeightedPointMeasure xi = cycle_measure_xi(s);
  ASSERT_EQ(xi.size(), 3u);
  for (const Atom& a : xi.atoms()) EXPECT_NEAR(a.weight, 1.0 / 3.0, 1e-15);
}

TEST(Measures, PointMeasureDoublingAndLsv) {
  const WeightedPointMeasure mu = cycle_point_measure(enumerate_cycles(doubling(), SampleWord{0, 0, 0}));
  ASSERT_EQ(mu.size(), 7u);
  for (const Atom& a : mu.atoms()) EXPECT_NEAR(a.weight, 1.0 / 7.0, 1e-14);

  const std::vector<double> al{0.5, 0.8};
  const CodedSystem lsv = build_alphabet_and_matrix(build_lsv_system(al, {0.5, 0.5}));
  const CycleSet s = enumerate_cycles(lsv, SampleWord{0, 1, 1, 0, 1});
  const WeightedPointMeasure m = cycle_point_measure(s);
  EXPECT_EQ(m.atoms()[0].point, 0.0);
  EXPECT_NEAR(m.atoms()[0].weight, 1.0 / s.z(), 1e-12);
}

TEST(Measures, MassesAreOne) {
  const CodedSystem cs = golden();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const CycleSet s = enumerate_cycles(cs, sample_word(cs.system.p(), 12, seed));
    EXPECT_NEAR(cycle_measure_xi(s).mass(), 1.0, 1e-12);
    EXPECT_NEAR(cycle_point_measure(s).mass(), 1.0, 1e-12);
  }
}

TEST(Skew, SingleMapEqualsSampleEnumeration) {
  const CodedSystem cs = doubling();
  const SkewEnumeration sk = enumerate_skew_fixed_points(cs, 3);
  const CycleSet s = enumerate_cycles(cs, SampleWord{0, 0, 0});
  ASSERT_EQ(sk.per_omega.size(), 1u);
  EXPECT_NEAR(sk.log_z, s.log_z, 1e-15);
  EXPECT_EQ(kolmogorov_distance(sk.zeta, cycle_measure_xi(s)), 0.0);
}

TEST(Skew, EquiprobableGoldenWords) {
  const SkewEnumeration sk = enumerate_skew_fixed_points(golden(0.5), 2);
  ASSERT_EQ(sk.per_omega.size(), 4u);
  for (double lq : sk.log_q) EXPECT_NEAR(std::exp(lq), 0.25, 1e-15);
}

TEST(Skew, TwoRoutesAgree) {
  const CodedSystem cs = golden();
  for (std::size_t n = 1; n <= 8; ++n) {
    const double a = enumerate_skew_fixed_points(cs, n).log_z;
    const double b = log_z_from_periodic_words(cs, n);
    EXPECT_NEAR(std::exp(a - b), 1.0, 1e-10) << "n " << n;
  }
}

TEST(Averaged, OneSeedEqualsXi) {
  const CodedSystem cs = golden();
  const std::vector<std::uint64_t> seeds{17};
  const WeightedPointMeasure eta = sample_averaged_measure(cs, 10, seeds);
  const WeightedPointMeasure xi = cycle_measure_xi(enumerate_cycles(cs, sample_word(cs.system.p(), 10, 17)));
  EXPECT_LT(kolmogorov_distance(eta, xi), 1e-14);
}

TEST(Averaged, SingleMapIgnoresSeed) {
  const CodedSystem cs = doubling();
  const std::vector<std::uint64_t> a{1}, b{2, 3};
  EXPECT_LT(kolmogorov_distance(sample_averaged_measure(cs, 6, a), sample_averaged_measure(cs, 6, b)), 1e-14);
}

TEST(Preimages, DoublingOneThird) {
  const PreimageSet p = enumerate_preimages(doubling(), SampleWord{0, 0}, 1.0 / 3.0);
  ASSERT_EQ(p.preimages.size(), 4u);
  const std::vector<double> expected{1.0 / 12.0, 1.0 / 3.0, 7.0 / 12.0, 5.0 / 6.0};
  std::vector<double> got;
  for (const Cycle& c : p.preimages) {
    got.push_back(c.point);
    EXPECT_NEAR(std::exp(c.log_weight - p.log_z), 0.25, 1e-15);
  }
  std::sort(got.begin(), got.end());
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(got[k], expected[k], 1e-15);
  EXPECT_NEAR(p.measure.mass(), 1.0, 1e-12);
}

TEST(Preimages, ZeroLengthIsDirac) {
  const PreimageSet p = enumerate_preimages(doubling(), SampleWord{}, 0.3);
  ASSERT_EQ(p.measure.size(), 1u);
  EXPECT_EQ(p.measure.atoms()[0].point, 0.3);
}

TEST(Preimages, BoundaryBasePointRejected) {
  EXPECT_THROW(enumerate_preimages(doubling(), SampleWord{0}, 0.5), DomainError);
  EXPECT_THROW(enumerate_preimages(doubling(), SampleWord{0}, 0.0), DomainError);
  EXPECT_THROW(enumerate_preimages(golden(), SampleWord{0}, 1.0), DomainError);
}

TEST(Pressure, DoublingValues) {
  EXPECT_NEAR(pressure_from_cycles(doubling(), SampleWord(3, 0)).per_sample, std::log(7.0 / 8.0) / 3.0, 1e-14);
  const Pressure p10 = pressure_from_cycles(doubling(), SampleWord(10, 0));
  EXPECT_NEAR(p10.per_sample, std::log(1023.0 / 1024.0) / 10.0, 1e-14);
  ASSERT_TRUE(p10.annealed);
  EXPECT_NEAR(*p10.annealed, p10.per_sample, 1e-14);
}

TEST(Pressure, ConstantSlopeGolden) {
  const CodedSystem cs = golden();
  const SampleWord omega = sample_word(cs.system.p(), 11, 5);
  const CycleSet s = enumerate_cycles(cs, omega);
  const double expected = (std::log(static_cast<double>(s.cycles.size())) - 11 * std::log(golden_ratio())) / 11.0;
  EXPECT_NEAR(pressure_from_cycles(cs, omega, {}, false).per_sample, expected, 1e-12);
}

TEST(Functionals, Examples) {
  const CycleSet s = enumerate_cycles(doubling(), SampleWord(3, 0));
  EXPECT_NEAR(weighted_functional_average(s, [](const CycleSet&, const Cycle&) { return 1.0; }), 1.0, 1e-15);
  const SkewObservable c = [](int, double) { return 2.5; };
  EXPECT_NEAR(weighted_functional_average(s, birkhoff_product(c, c)), 6.25, 1e-12);
  EXPECT_NEAR(weighted_functional_average(s, birkhoff_average([](int, double x) { return x; })), 3.0 / 7.0, 1e-12);
  EXPECT_NEAR(weighted_functional_average(s, birkhoff_ratio(c, [](int, double) { return 5.0; })), 0.5, 1e-12);
  const auto conv = double_sum_convolution([](int, double x) { return x; }, [](int, double) { return 0.0; },
                                           [](double v) { return v; });
  EXPECT_NEAR(weighted_functional_average(s, conv), 3.0 / 7.0, 1e-12);
}

TEST(Functionals, NonFiniteNamesCycle) {
  const CycleSet s = enumerate_cycles(doubling(), SampleWord(3, 0));
  try {
    weighted_functional_average(s, [](const CycleSet&, const Cycle& c) { return c.point == 0.0 ? NAN : 1.0; });
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("1-1-1"), std::string::npos) << e.what();
  }
}
