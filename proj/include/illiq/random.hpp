#pragma once

#include <cstdint>

namespace illiq::rng {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent stream key for a named sub-purpose of one user seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(seed ^ mix64(tag * 0xD1B54A32D192ED03ULL));
}

/// Counter-based uniform on the open interval (0,1): draw `counter` of
/// stream `seed` depends only on the pair, never on call order.
constexpr double uniform_open(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t bits = mix64(mix64(seed) + (counter + 1) * 0x9E3779B97F4A7C15ULL);
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double normal_quantile(double p);
double normal_cdf(double x);

/// Inverse-CDF standard normal draw.
inline double standard_normal(std::uint64_t seed, std::uint64_t counter) {
  return normal_quantile(uniform_open(seed, counter));
}

/// Convenience wrapper for call sites that consume draws sequentially.
class CounterStream {
 public:
  explicit CounterStream(std::uint64_t seed, std::uint64_t first = 0) : seed_(seed), next_(first) {}

  double uniform() { return uniform_open(seed_, next_++); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return standard_normal(seed_, next_++); }
  std::uint64_t position() const { return next_; }

 private:
  std::uint64_t seed_;
  std::uint64_t next_;
};

}  // namespace illiq::rng
