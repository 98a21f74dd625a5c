#include "dehn/simd/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

#include <algorithm>

namespace dehn::simd {
namespace {

void axpy(double* out, const double* in, std::size_t n, double scale) {
  const float64x2_t s = vdupq_n_f64(scale);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t o = vld1q_f64(out + i);
    float64x2_t x = vld1q_f64(in + i);
    vst1q_f64(out + i, vaddq_f64(o, vmulq_f64(s, x)));
  }
  for (; i < n; ++i) out[i] = out[i] + scale * in[i];
}

double max_value(const double* data, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vld1q_f64(data + i));
  double r = std::max(vgetq_lane_f64(m, 0), vgetq_lane_f64(m, 1));
  for (; i < n; ++i) r = std::max(r, data[i]);
  return r;
}

double truncate_below(double* data, std::size_t n, double floor) {
  const float64x2_t f = vdupq_n_f64(floor);
  float64x2_t dropped = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t x = vld1q_f64(data + i);
    uint64x2_t below = vcltq_f64(x, f);
    float64x2_t gone = vreinterpretq_f64_u64(vandq_u64(below, vreinterpretq_u64_f64(x)));
    dropped = vaddq_f64(dropped, gone);
    vst1q_f64(data + i, vreinterpretq_f64_u64(vbicq_u64(vreinterpretq_u64_f64(x), below)));
  }
  double r = vgetq_lane_f64(dropped, 0) + vgetq_lane_f64(dropped, 1);
  for (; i < n; ++i) {
    if (data[i] < floor) {
      r += data[i];
      data[i] = 0.0;
    }
  }
  return r;
}

double sum(const double* data, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(data + i));
  double r = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) r += data[i];
  return r;
}

void maxplus_row(std::int32_t* out, const std::int32_t* left, const std::int32_t* right,
                 const std::int32_t* lo, const std::int32_t* hi, std::size_t n,
                 std::int32_t add_lo, std::int32_t add_hi) {
  const int32x4_t alo = vdupq_n_s32(add_lo);
  const int32x4_t ahi = vdupq_n_s32(add_hi);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    int32x4_t m = vmaxq_s32(vld1q_s32(left + j), vld1q_s32(right + j));
    int32x4_t a = vaddq_s32(vld1q_s32(lo + j), alo);
    int32x4_t b = vaddq_s32(vld1q_s32(hi + j), ahi);
    vst1q_s32(out + j, vmaxq_s32(m, vmaxq_s32(a, b)));
  }
  for (; j < n; ++j) {
    out[j] = std::max(std::max(left[j], right[j]), std::max(lo[j] + add_lo, hi[j] + add_hi));
  }
}

constexpr KernelTable kNeon{Isa::Neon, "neon", axpy, max_value, truncate_below, sum, maxplus_row};

}  // namespace

const KernelTable* neon_kernels() { return &kNeon; }

}  // namespace dehn::simd

#else

namespace dehn::simd {
const KernelTable* neon_kernels() { return nullptr; }
}  // namespace dehn::simd

#endif
