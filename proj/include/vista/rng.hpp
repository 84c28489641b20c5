#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace vista {

/// SplitMix64: a counter-based 64-bit generator (Steele, Lea & Flood).
/// Cheap enough to construct per round, which lets every stream be keyed
/// on (master seed, run, round, purpose) instead of being threaded through
/// the simulation.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// +1.0 or -1.0 with equal probability.
  double sign() { return ((*this)() >> 63) ? 1.0 : -1.0; }

  /// Standard normal via Marsaglia's polar method; no cached second value.
  double normal();

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Purpose tags for derived streams. Values are part of the on-disk
/// determinism contract; append only.
enum class StreamTag : std::uint64_t {
  run = 1,
  round_reports = 2,
  curve_point = 3,
  probe = 4,
};

/// Hashes a master seed and a key path into an independent stream seed.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

inline std::uint64_t derive_seed(std::uint64_t master, StreamTag tag,
                                 std::initializer_list<std::uint64_t> keys) {
  std::uint64_t s = derive_seed(master, {static_cast<std::uint64_t>(tag)});
  return derive_seed(s, keys);
}

}  // namespace vista
