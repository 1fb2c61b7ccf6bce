#pragma once

#include <cstddef>
#include <cstdint>

namespace greenrec {

// Counter-based random stream (splitmix64). A stream is a pure function of
// (seed, lane keys, draw counter), so a sample drawn for slot j of generation g
// is the same no matter how the work is partitioned across threads.
class SubStream {
 public:
  explicit SubStream(std::uint64_t seed, std::uint64_t k1 = 0, std::uint64_t k2 = 0,
                     std::uint64_t k3 = 0) {
    state_ = mix(seed + 0x9E3779B97F4A7C15ull);
    state_ = mix(state_ ^ mix(k1 + 0xBF58476D1CE4E5B9ull));
    state_ = mix(state_ ^ mix(k2 + 0x94D049BB133111EBull));
    state_ = mix(state_ ^ mix(k3 + 0xD6E8FEB86659FD93ull));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // uniform in [0,1), 53-bit resolution
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // uniform index in [0,n); multiply-shift, bias < n/2^64
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<__uint128_t>(next_u64()) * static_cast<__uint128_t>(n)) >> 64);
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  std::uint64_t state_;
};

}  // namespace greenrec
