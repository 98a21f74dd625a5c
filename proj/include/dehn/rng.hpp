#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace dehn {

/// Philox4x32-10 counter-based generator. A (seed, stream) pair names an
/// independent substream; samples use stream = sample index so any worker
/// can reproduce any sample without coordination.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();
  /// Uniform on [0, bound), unbiased.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// One Philox4x32-10 block; exposed for known-answer checks.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int available_ = 0;
};

}  // namespace dehn
