#include <algorithm>

#include "dehn/simd/kernels.hpp"

namespace dehn::simd {
namespace {

void axpy(double* out, const double* in, std::size_t n, double scale) {
  for (std::size_t i = 0; i < n; ++i) out[i] = out[i] + scale * in[i];
}

double max_value(const double* data, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, data[i]);
  return m;
}

double truncate_below(double* data, std::size_t n, double floor) {
  double dropped = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (data[i] < floor) {
      dropped += data[i];
      data[i] = 0.0;
    }
  }
  return dropped;
}

double sum(const double* data, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += data[i];
  return s;
}

void maxplus_row(std::int32_t* out, const std::int32_t* left, const std::int32_t* right,
                 const std::int32_t* lo, const std::int32_t* hi, std::size_t n,
                 std::int32_t add_lo, std::int32_t add_hi) {
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = std::max(std::max(left[j], right[j]), std::max(lo[j] + add_lo, hi[j] + add_hi));
  }
}

constexpr KernelTable kScalar{Isa::Scalar, "scalar", axpy, max_value, truncate_below, sum, maxplus_row};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace dehn::simd
