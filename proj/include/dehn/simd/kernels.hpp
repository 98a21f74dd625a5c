#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference; SIMD
// variants must produce bitwise-identical element outputs (reductions may
// differ in summation order only).

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace dehn::simd {

enum class Isa { Scalar, Avx2, Neon };

/// Sentinel for "unreachable" in max-plus rows. Anything below kNegInf / 2
/// is treated as -infinity by callers.
inline constexpr std::int32_t kNegInf = -(1 << 29);

struct KernelTable {
  Isa isa;
  const char* name;
  /// out[i] += scale * in[i]
  void (*axpy)(double* out, const double* in, std::size_t n, double scale);
  double (*max_value)(const double* data, std::size_t n);
  /// Zeroes entries strictly below `floor`; returns the mass removed.
  double (*truncate_below)(double* data, std::size_t n, double floor);
  double (*sum)(const double* data, std::size_t n);
  /// out[j] = max(left[j], right[j], lo[j] + add_lo, hi[j] + add_hi)
  void (*maxplus_row)(std::int32_t* out, const std::int32_t* left, const std::int32_t* right,
                      const std::int32_t* lo, const std::int32_t* hi, std::size_t n,
                      std::int32_t add_lo, std::int32_t add_hi);
};

const KernelTable& scalar_kernels();
/// nullptr when the variant is not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

/// Every variant usable on this machine, scalar first.
std::vector<const KernelTable*> available_kernels();

/// Best available variant, overridable with DEHNLAB_KERNELS=scalar|avx2|neon.
const KernelTable& active_kernels();

}  // namespace dehn::simd
