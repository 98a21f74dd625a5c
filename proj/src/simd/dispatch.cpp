#include <cstdlib>
#include <string_view>

#include "dehn/simd/kernels.hpp"

namespace dehn::simd {

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&scalar_kernels()};
  if (const KernelTable* k = avx2_kernels()) out.push_back(k);
  if (const KernelTable* k = neon_kernels()) out.push_back(k);
  return out;
}

const KernelTable& active_kernels() {
  static const KernelTable* chosen = [] {
    const auto all = available_kernels();
    if (const char* env = std::getenv("DEHNLAB_KERNELS")) {
      const std::string_view want(env);
      for (const KernelTable* k : all)
        if (want == k->name) return k;
      return all.front();
    }
    return all.back();
  }();
  return *chosen;
}

}  // namespace dehn::simd
