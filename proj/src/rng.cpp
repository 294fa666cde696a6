#include "heiscr/rng.hpp"

namespace heiscr {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(mix64(seed + kGolden) ^ (stream * 0xD1B54A32D192ED03ULL + 1))) {}

CounterRng::CounterRng(std::uint64_t key, std::uint64_t counter, int) : key_(key), counter_(counter) {}

std::uint64_t CounterRng::next_u64() {
  const std::uint64_t c = counter_++;
  return mix64(key_ + (c + 1) * kGolden);
}

double CounterRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

CounterRng CounterRng::derive(std::uint64_t sub) const {
  return CounterRng(mix64(key_ ^ mix64(sub * kGolden + 0x632BE59BD9B4E019ULL)), 0, 0);
}

}  // namespace heiscr
