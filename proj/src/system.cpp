#include "rcycles/system.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace rcycles {
namespace {

void check_probability_vector(std::span<const double> p, std::size_t n) {
  if (p.size() != n) {
    std::ostringstream os;
    os << "probability vector has " << p.size() << " entries for " << n << " maps";
    throw DomainError(os.str());
  }
  for (double v : p) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("probabilities must be positive");
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("probabilities must sum to 1");
}

}  // namespace

RandomSystem::RandomSystem(std::vector<MarkovMap> maps, std::vector<double> p, bool identify_endpoints)
    : maps_(std::move(maps)), p_(std::move(p)), identify_endpoints_(identify_endpoints) {
  if (maps_.empty()) throw DomainError("random system needs at least one map");
  check_probability_vector(p_, maps_.size());
  const Interval& X = maps_.front().ambient();
  for (const MarkovMap& m : maps_) {
    if (std::abs(m.ambient().lo() - X.lo()) > 1e-12 || std::abs(m.ambient().hi() - X.hi()) > 1e-12) {
      throw DomainError("all maps must share the same ambient interval");
    }
  }
}

RandomSystem RandomSystem::with_p(std::vector<double> p) const {
  return RandomSystem(maps_, std::move(p), identify_endpoints_);
}

double RandomSystem::compose(std::span<const int> omega, double x) const {
  for (int letter : omega) x = map(static_cast<std::size_t>(letter)).evaluate(x).value;
  return x;
}

SampleStream::SampleStream(std::span<const double> p, std::uint64_t seed) : engine_(seed) {
  check_probability_vector(p, p.size());
  cumulative_.resize(p.size());
  std::partial_sum(p.begin(), p.end(), cumulative_.begin());
}

int SampleStream::next() {
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  for (std::size_t i = 0; i + 1 < cumulative_.size(); ++i) {
    if (u < cumulative_[i]) return static_cast<int>(i);
  }
  return static_cast<int>(cumulative_.size()) - 1;
}

SampleWord SampleStream::take(std::size_t n) {
  SampleWord w(n);
  for (auto& letter : w) letter = next();
  return w;
}

SampleWord sample_word(std::span<const double> p, std::size_t n, std::uint64_t seed) {
  return SampleStream(p, seed).take(n);
}

double log_word_probability(std::span<const double> p, std::span<const int> omega) {
  double s = 0.0;
  for (int letter : omega) s += std::log(p[static_cast<std::size_t>(letter)]);
  return s;
}

}  // namespace rcycles
