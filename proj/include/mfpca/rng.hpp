#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace mfpca {

/// Independent random streams of one replication. Each consumer of
/// randomness draws from its own stream so that, e.g., enabling noise never
/// shifts the scores.
enum class Stream : std::uint64_t {
  kAlpha = 1,
  kScores = 2,
  kNoise = 3,
  kMask = 4,
  kTrial = 5,
};

/// Philox4x32-10 counter-based generator keyed by a 64-bit seed, with a
/// 64-bit stream id in the upper counter words. Output is identical on every
/// platform; the floating-point transforms below use only IEEE arithmetic
/// and libm log/sqrt/cos.
class CounterRng {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  CounterRng(std::uint64_t seed, std::uint64_t stream);
  CounterRng(std::uint64_t seed, Stream stream)
      : CounterRng(seed, static_cast<std::uint64_t>(stream)) {}

  /// Raw bijection of the 10-round Philox4x32 cipher.
  static Block philox(Block counter, Key key);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller.
  double normal();
  /// Uniform integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n);

 private:
  Key key_{};
  std::uint64_t stream_ = 0;
  std::uint64_t block_index_ = 0;
  Block buffer_{};
  int buffered_ = 0;
  std::optional<double> spare_normal_;
};

/// SplitMix64 mixing of (master, index); used to derive per-replication seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace mfpca
