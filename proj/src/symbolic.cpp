#include "rcycles/symbolic.hpp"

#include <sstream>

namespace rcycles {
namespace {

void check_omega(const CodedSystem& cs, std::span<const int> omega) {
  for (int letter : omega) {
    if (letter < 0 || static_cast<std::size_t>(letter) >= cs.system.size()) {
      throw DomainError("sample word letter out of range");
    }
  }
}

}  // namespace

Alphabet::Alphabet(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
  for (std::size_t a = 0; a < symbols_.size(); ++a) {
    const auto owner = static_cast<std::size_t>(symbols_[a].map);
    if (by_map_.size() <= owner) by_map_.resize(owner + 1);
    by_map_[owner].push_back(static_cast<int>(a));
  }
}

bool TransitionMatrix::irreducible() const {
  for (std::size_t start = 0; start < n_; ++start) {
    std::vector<bool> seen(n_, false);
    std::vector<std::size_t> stack{start};
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < n_; ++b) {
        if ((*this)(a, b) && !seen[b]) {
          seen[b] = true;
          stack.push_back(b);
        }
      }
    }
    for (bool s : seen) {
      if (!s) return false;
    }
  }
  return true;
}

TransitionMatrix TransitionMatrix::boolean_product(const TransitionMatrix& other) const {
  TransitionMatrix out(n_);
  for (std::size_t a = 0; a < n_; ++a) {
    for (std::size_t c = 0; c < n_; ++c) {
      if (!(*this)(a, c)) continue;
      for (std::size_t b = 0; b < n_; ++b) {
        if (other(c, b)) out.set(a, b, true);
      }
    }
  }
  return out;
}

bool TransitionMatrix::all_positive() const {
  for (auto v : m_) {
    if (v == 0) return false;
  }
  return true;
}

CodedSystem build_alphabet_and_matrix(RandomSystem system, double tol) {
  std::vector<Symbol> symbols;
  for (std::size_t i = 0; i < system.size(); ++i) {
    const MarkovMap& m = system.map(i);
    const ValidationReport rep = validate_markov(m, tol);
    if (!rep.passed) {
      std::ostringstream os;
      os << "map " << i + 1 << " is not a valid Markov map: " << rep.failures.front();
      throw MarkovError(os.str());
    }
    for (std::size_t k = 0; k < m.size(); ++k) {
      symbols.push_back(Symbol{static_cast<int>(i), static_cast<int>(k), m.branch(k).domain()});
    }
  }

  TransitionMatrix matrix(symbols.size());
  for (std::size_t a = 0; a < symbols.size(); ++a) {
    const Branch& br = system.map(symbols[a].map).branch(symbols[a].branch);
    const Interval img = br.image();
    for (std::size_t b = 0; b < symbols.size(); ++b) {
      const Interval& cell = symbols[b].cell;
      if (img.overlap(cell.lo(), cell.hi()) <= tol) continue;
      if (!img.contains(cell, tol)) {
        std::ostringstream os;
        os << "branch " << symbols[a].branch + 1 << " of map " << symbols[a].map + 1
           << " meets cell " << b + 1 << " without covering it";
        throw MarkovError(os.str());
      }
      matrix.set(a, b, true);
    }
  }
  return CodedSystem{std::move(system), Alphabet(std::move(symbols)), std::move(matrix)};
}

std::optional<int> mixing_index(const TransitionMatrix& m, int n_max) {
  if (m.size() == 0) return std::nullopt;
  TransitionMatrix power = m;
  for (int n = 1; n <= n_max; ++n) {
    if (power.all_positive()) return n;
    power = power.boolean_product(m);
  }
  return std::nullopt;
}

void for_each_admissible_word(const CodedSystem& cs, std::span<const int> omega,
                              const std::function<void(std::span<const int>)>& visit) {
  check_omega(cs, omega);
  const std::size_t n = omega.size();
  if (n == 0) {
    visit({});
    return;
  }
  std::vector<int> word(n);
  // Explicit stack of candidate positions keeps deep words off the call stack.
  std::vector<std::size_t> pos(n, 0);
  std::size_t depth = 0;
  while (true) {
    const auto candidates = cs.alphabet.symbols_of(static_cast<std::size_t>(omega[depth]));
    bool advanced = false;
    while (pos[depth] < candidates.size()) {
      const int a = candidates[pos[depth]++];
      if (depth > 0 && !cs.matrix(static_cast<std::size_t>(word[depth - 1]), static_cast<std::size_t>(a))) continue;
      word[depth] = a;
      advanced = true;
      break;
    }
    if (!advanced) {
      if (depth == 0) return;
      pos[depth] = 0;
      --depth;
      continue;
    }
    if (depth + 1 == n) {
      visit(word);
    } else {
      ++depth;
      pos[depth] = 0;
    }
  }
}

std::vector<SymbolWord> admissible_words(const CodedSystem& cs, std::span<const int> omega) {
  std::vector<SymbolWord> out;
  for_each_admissible_word(cs, omega, [&](std::span<const int> w) { out.emplace_back(w.begin(), w.end()); });
  return out;
}

double count_admissible_words(const CodedSystem& cs, std::span<const int> omega) {
  check_omega(cs, omega);
  if (omega.empty()) return 1.0;
  const std::size_t A = cs.alphabet.size();
  std::vector<double> v(A, 0.0);
  for (int a : cs.alphabet.symbols_of(static_cast<std::size_t>(omega[0]))) v[static_cast<std::size_t>(a)] = 1.0;
  for (std::size_t k = 1; k < omega.size(); ++k) {
    std::vector<double> next(A, 0.0);
    for (int b : cs.alphabet.symbols_of(static_cast<std::size_t>(omega[k]))) {
      double s = 0.0;
      for (std::size_t a = 0; a < A; ++a) {
        if (v[a] != 0.0 && cs.matrix(a, static_cast<std::size_t>(b))) s += v[a];
      }
      next[static_cast<std::size_t>(b)] = s;
    }
    v = std::move(next);
  }
  double total = 0.0;
  for (double x : v) total += x;
  return total;
}

double count_all_words(const CodedSystem& cs, std::size_t n) {
  if (n == 0) return 1.0;
  const std::size_t A = cs.alphabet.size();
  std::vector<double> v(A, 1.0);
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<double> next(A, 0.0);
    for (std::size_t a = 0; a < A; ++a) {
      for (std::size_t b = 0; b < A; ++b) {
        if (cs.matrix(a, b)) next[b] += v[a];
      }
    }
    v = std::move(next);
  }
  double total = 0.0;
  for (double x : v) total += x;
  return total;
}

Interval cylinder_interval(const CodedSystem& cs, std::span<const int> word) {
  if (word.empty()) return cs.system.ambient();
  auto symbol = [&](int a) -> const Symbol& {
    if (a < 0 || static_cast<std::size_t>(a) >= cs.alphabet.size()) throw DomainError("symbol out of range");
    return cs.alphabet[static_cast<std::size_t>(a)];
  };
  double lo = symbol(word.back()).cell.lo();
  double hi = symbol(word.back()).cell.hi();
  for (std::size_t k = word.size() - 1; k-- > 0;) {
    const Symbol& s = symbol(word[k]);
    const Branch& br = cs.system.map(s.map).branch(s.branch);
    const Interval img = br.image();
    const double a = std::max(lo, img.lo());
    const double b = std::min(hi, img.hi());
    if (!(a < b)) throw DomainError("word is not admissible: empty cylinder");
    double x0 = br.inverse(a);
    double x1 = br.inverse(b);
    if (!br.increasing()) std::swap(x0, x1);
    lo = x0;
    hi = x1;
    if (!(lo < hi)) throw DomainError("word is not admissible: degenerate cylinder");
  }
  return Interval(lo, hi);
}

}  // namespace rcycles
