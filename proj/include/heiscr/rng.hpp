#pragma once

#include <cstdint>

namespace heiscr {

/// Counter-based generator: the k-th draw of stream (seed, stream) is a fixed
/// hash of (seed, stream, k), so streams are reproducible on every platform and
/// independent streams can be derived per task without shared state.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// A new independent stream keyed by this generator's key and `sub`.
  CounterRng derive(std::uint64_t sub) const;

  std::uint64_t counter() const { return counter_; }

 private:
  CounterRng(std::uint64_t key, std::uint64_t counter, int);

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace heiscr
