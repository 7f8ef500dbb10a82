#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rcycles/cycles.hpp"

namespace rcycles {

// Random system of L-S-V maps L_alpha on [0,1], one per alpha. Throws DomainError for alpha <= 0.
RandomSystem build_lsv_system(std::span<const double> alphas, std::vector<double> p);

struct ReturnTimeTail {
  std::vector<double> tail;  // tail[k] = Leb{t > k + 1}, k = 0..n_max-1
  double exponent;           // least-squares slope of log tail against log n on [n_max/10, n_max]
};

// Tail of the exit time from the neutral cell: x_0 = 1/2, x_n = f^{-1}(x_{n-1}) for the left
// branch f, and {t > n} = [0, x_n). Throws DomainError when the branch is not an L-S-V left
// branch and NumericalError when the sequence fails to decrease.
ReturnTimeTail return_time_tail(const MarkovMap& map, std::size_t branch_index, std::size_t n_max);

enum class LsvCase { b, c, unresolved };

// c when every alpha < 1, b when every alpha >= 1, unresolved otherwise.
LsvCase classify_case(std::span<const double> alphas);
const char* to_string(LsvCase c);

struct NeutralProfile {
  std::vector<double> eps;
  std::vector<double> mass;       // xi_n^omega([0, eps))
  double neutral_weight = 0.0;    // normalized weight 1/Z of the cycle at 0 (0 when absent)
};

// Diagnostics of the weight carried near the neutral fixed point 0.
NeutralProfile neutral_mass_profile(const CycleSet& set, std::span<const double> eps = {});
NeutralProfile neutral_mass_profile(const CodedSystem& cs, std::span<const int> omega,
                                    const CycleOptions& opts = {});

}  // namespace rcycles
