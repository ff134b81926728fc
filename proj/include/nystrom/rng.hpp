#pragma once

// Counter-based random streams.
//
// A stream is identified by (master_seed, stream_id). Its 64-bit key is
//
//   key = mix64(master_seed + mix64(stream_id ^ 0xD1B54A32D192ED03))
//
// and the i-th raw output (i = 0, 1, ...) is
//
//   x_i = mix64(key + (i + 1) * 0x9E3779B97F4A7C15)
//
// where mix64 is the SplitMix64 finalizer
//
//   z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//   z ^= z >> 27; z *= 0x94D049BB133111EB;
//   z ^= z >> 31.
//
// All arithmetic is modulo 2^64. Derived variates:
//   uniform01     = (x >> 11) * 2^-53                     in [0, 1)
//   uniform_below = Lemire's multiply-shift with rejection (unbiased)
//   normal        = Box-Muller, cos branch then sin branch of one pair
// Every step is integer or IEEE-754 double arithmetic with no library
// distributions, so streams are identical across platforms and schedules.

#include <cstdint>

namespace nystrom {

struct RngSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

/// The stream key for a seed; also what trial records report as the seed.
std::uint64_t stream_key(const RngSeed& seed) noexcept;

class Rng {
 public:
  explicit Rng(const RngSeed& seed) noexcept : key_(stream_key(seed)) {}

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t next_u64() noexcept;
  double uniform01() noexcept;
  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound) noexcept;
  double normal() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace nystrom
