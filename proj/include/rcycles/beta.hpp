#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rcycles/cycles.hpp"

namespace rcycles {

// Random beta-transformation: greedy T1 and lazy T2 = u T1 u on X = [0, floor(beta)/(beta-1)],
// u(x) = floor(beta)/(beta-1) - x. Both maps are built as beta_piece branches on one common
// Markov partition, so each branch offset is the digit it emits.
struct BetaSystem {
  double beta;
  int max_digit;                          // floor(beta)
  std::vector<double> greedy_orbit_of_1;  // 1, T1(1), ..., 0
  std::vector<double> partition;         // sorted cell boundaries, ends included
  CodedSystem coded;

  double x_hi() const noexcept { return partition.back(); }
  double reflect(double x) const noexcept { return x_hi() - x; }
};

// Throws DomainError for an integer or <= 1 beta and MarkovError when the greedy expansion of 1
// does not terminate within depth_bound steps.
BetaSystem build_beta_system(double beta, std::vector<double> p = {0.5, 0.5}, int depth_bound = 64);

// The two maps on their own, on the same partition as build_beta_system.
MarkovMap beta_greedy_map(double beta, int depth_bound = 64);
MarkovMap beta_lazy_map(double beta, int depth_bound = 64);

// Greedy digit e1(x) and lazy digit e2(x) = floor(beta) - e1(u(x)).
int greedy_digit(double beta, double x);
int lazy_digit(double beta, double x);

struct DigitSequence {
  std::vector<int> digits;
  SampleWord omega;
  double x;
};

// Digits of a cycle, read off the branch offsets of its word.
DigitSequence digit_sequence(const BetaSystem& bs, const Cycle& cycle, std::span<const int> omega);

// Digits of x along omega, through MarkovMap::evaluate.
DigitSequence digit_sequence(const BetaSystem& bs, std::span<const int> omega, double x);

// sum_k d_k beta^-k + beta^-n tail.
double reconstruct(double beta, std::span<const int> digits, double tail);

struct DigitStats {
  std::vector<double> freq;  // indexed by digit 0..max_digit
  double symmetric_mean;
  double mean_distance;
};

// Throws DomainError for fewer than two digits.
DigitStats digit_stats(std::span<const int> digits, int max_digit);

// q_i = (1/2)(1 + (2 p_{i+1} - 1)/sqrt(5)) for the golden ratio.
std::vector<double> q_closed_form_golden(double p1);

// q_i = p1 lambda(L_i) + p2 lambda(u(L_{floor(beta) - i})), lambda the measure with this density.
std::vector<double> q_from_density(const BetaSystem& bs, std::span<const double> p,
                                   const PiecewiseConstantDensity& density);

// (sum_i i q_i)^2
double symmetric_mean_limit(std::span<const double> q);
// 2 sum_{i<j} (j - i) q_i q_j
double mean_distance_limit(std::span<const double> q);

// Probability mass of each digit difference -max..max (index shifted by max_digit): empirical
// from a digit block, or sum_{i,j} q_i q_j delta_{i-j}.
std::vector<double> digit_difference_distribution(std::span<const int> digits, int max_digit);
std::vector<double> digit_difference_limit(std::span<const double> q);

// Digits of a seeded random orbit of the given length from x0.
std::vector<int> random_orbit_digits(const BetaSystem& bs, std::uint64_t seed, std::size_t length, double x0);

double golden_ratio();

}  // namespace rcycles
