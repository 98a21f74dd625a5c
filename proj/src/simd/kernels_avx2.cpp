#include "dehn/simd/kernels.hpp"

#if defined(DEHN_HAVE_AVX2)

#include <immintrin.h>

#include <algorithm>

namespace dehn::simd {
namespace {

// No FMA: the scalar reference rounds the product and the sum separately.
void axpy(double* out, const double* in, std::size_t n, double scale) {
  const __m256d s = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d o = _mm256_loadu_pd(out + i);
    __m256d x = _mm256_loadu_pd(in + i);
    _mm256_storeu_pd(out + i, _mm256_add_pd(o, _mm256_mul_pd(s, x)));
  }
  for (; i < n; ++i) out[i] = out[i] + scale * in[i];
}

double max_value(const double* data, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_loadu_pd(data + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) r = std::max(r, data[i]);
  return r;
}

double truncate_below(double* data, std::size_t n, double floor) {
  const __m256d f = _mm256_set1_pd(floor);
  __m256d dropped = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(data + i);
    __m256d below = _mm256_cmp_pd(x, f, _CMP_LT_OQ);
    dropped = _mm256_add_pd(dropped, _mm256_and_pd(below, x));
    _mm256_storeu_pd(data + i, _mm256_andnot_pd(below, x));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, dropped);
  double r = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) {
    if (data[i] < floor) {
      r += data[i];
      data[i] = 0.0;
    }
  }
  return r;
}

double sum(const double* data, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(data + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double r = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) r += data[i];
  return r;
}

void maxplus_row(std::int32_t* out, const std::int32_t* left, const std::int32_t* right,
                 const std::int32_t* lo, const std::int32_t* hi, std::size_t n,
                 std::int32_t add_lo, std::int32_t add_hi) {
  const __m256i alo = _mm256_set1_epi32(add_lo);
  const __m256i ahi = _mm256_set1_epi32(add_hi);
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    __m256i l = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(left + j));
    __m256i r = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(right + j));
    __m256i a = _mm256_add_epi32(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(lo + j)), alo);
    __m256i b = _mm256_add_epi32(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(hi + j)), ahi);
    __m256i m = _mm256_max_epi32(_mm256_max_epi32(l, r), _mm256_max_epi32(a, b));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + j), m);
  }
  for (; j < n; ++j) {
    out[j] = std::max(std::max(left[j], right[j]), std::max(lo[j] + add_lo, hi[j] + add_hi));
  }
}

constexpr KernelTable kAvx2{Isa::Avx2, "avx2", axpy, max_value, truncate_below, sum, maxplus_row};

}  // namespace

const KernelTable* avx2_kernels() {
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &kAvx2 : nullptr;
}

}  // namespace dehn::simd

#else

namespace dehn::simd {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace dehn::simd

#endif
