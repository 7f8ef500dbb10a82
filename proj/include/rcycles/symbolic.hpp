#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rcycles/system.hpp"

namespace rcycles {

// Global symbol: branch `branch` of map `map`, with cell J(a). Symbols of map 0 come first,
// then map 1, and so on, each block in branch order.
struct Symbol {
  int map;
  int branch;
  Interval cell;
};

class Alphabet {
 public:
  explicit Alphabet(std::vector<Symbol> symbols);

  std::size_t size() const noexcept { return symbols_.size(); }
  const Symbol& operator[](std::size_t a) const { return symbols_.at(a); }
  std::span<const Symbol> symbols() const noexcept { return symbols_; }
  // Global indices owned by map i, ascending.
  std::span<const int> symbols_of(std::size_t map) const { return by_map_.at(map); }

 private:
  std::vector<Symbol> symbols_;
  std::vector<std::vector<int>> by_map_;
};

// 0/1 matrix m_ab = 1 iff the image of J(a) under its map covers J(b).
class TransitionMatrix {
 public:
  explicit TransitionMatrix(std::size_t n) : n_(n), m_(n * n, 0) {}

  std::size_t size() const noexcept { return n_; }
  bool operator()(std::size_t a, std::size_t b) const { return m_[a * n_ + b] != 0; }
  void set(std::size_t a, std::size_t b, bool v) { m_[a * n_ + b] = v ? 1 : 0; }

  bool irreducible() const;
  TransitionMatrix boolean_product(const TransitionMatrix& other) const;
  bool all_positive() const;

 private:
  std::size_t n_;
  std::vector<std::uint8_t> m_;
};

// A random system together with its symbolic coding.
struct CodedSystem {
  RandomSystem system;
  Alphabet alphabet;
  TransitionMatrix matrix;
};

// Disjoint-union alphabet and transition matrix. Throws MarkovError naming the branch when some
// branch image meets the interior of a cell without covering it.
CodedSystem build_alphabet_and_matrix(RandomSystem system, double tol = 1e-9);

// Smallest n0 <= n_max with M^n0 entrywise positive.
std::optional<int> mixing_index(const TransitionMatrix& m, int n_max);

using SymbolWord = std::vector<int>;

// Calls `visit` for every word a_1..a_n with owner(a_k) = omega_k and m_{a_k a_{k+1}} = 1, in
// lexicographic order. An empty omega yields the empty word once.
void for_each_admissible_word(const CodedSystem& cs, std::span<const int> omega,
                              const std::function<void(std::span<const int>)>& visit);

std::vector<SymbolWord> admissible_words(const CodedSystem& cs, std::span<const int> omega);

// Number of admissible words for omega, by block matrix-vector products (floating point, so it
// doubles as a size estimate for long words).
double count_admissible_words(const CodedSystem& cs, std::span<const int> omega);

// Number of admissible words of length n over the whole alphabet.
double count_all_words(const CodedSystem& cs, std::size_t n);

// J(a_1..a_n): K_n = J(a_n), K_k = J(a_k) ∩ f_{a_k}^{-1}(K_{k+1}). Throws DomainError for an
// inadmissible word with empty intersection.
Interval cylinder_interval(const CodedSystem& cs, std::span<const int> word);

}  // namespace rcycles
