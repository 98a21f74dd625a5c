#include <cstring>
#include <vector>

#include "doctest.h"
#include "dehn/rng.hpp"
#include "dehn/simd/kernels.hpp"

using namespace dehn;
using namespace dehn::simd;

namespace {

std::vector<double> random_doubles(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform01() * (rng.below(4) == 0 ? 1e-16 : 1.0);
  return v;
}

std::vector<std::int32_t> random_ints(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed, 1);
  std::vector<std::int32_t> v(n);
  for (auto& x : v) x = rng.below(8) == 0 ? kNegInf : static_cast<std::int32_t>(rng.below(2000)) - 1000;
  return v;
}

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("every available variant matches the scalar kernels") {
    const KernelTable& ref = scalar_kernels();
    for (const KernelTable* k : available_kernels()) {
      INFO(k->name);
      for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 16u, 33u, 1000u}) {
        const auto in = random_doubles(n, n + 1);
        auto a = random_doubles(n, n + 2), b = a;
        ref.axpy(a.data(), in.data(), n, 0.2);
        k->axpy(b.data(), in.data(), n, 0.2);
        CHECK(std::memcmp(a.data(), b.data(), n * sizeof(double)) == 0);

        CHECK(ref.max_value(in.data(), n) == k->max_value(in.data(), n));

        auto ta = in, tb = in;
        const double ma = ref.truncate_below(ta.data(), n, 1e-3);
        const double mb = k->truncate_below(tb.data(), n, 1e-3);
        CHECK(std::memcmp(ta.data(), tb.data(), n * sizeof(double)) == 0);
        CHECK(ma == doctest::Approx(mb).epsilon(1e-12));
        CHECK(ref.sum(in.data(), n) == doctest::Approx(k->sum(in.data(), n)).epsilon(1e-12));

        const auto l = random_ints(n, 1), r = random_ints(n, 2), lo = random_ints(n, 3), hi = random_ints(n, 4);
        std::vector<std::int32_t> oa(n), ob(n);
        ref.maxplus_row(oa.data(), l.data(), r.data(), lo.data(), hi.data(), n, 7, -3);
        k->maxplus_row(ob.data(), l.data(), r.data(), lo.data(), hi.data(), n, 7, -3);
        CHECK(oa == ob);
      }
    }
  }

  TEST_CASE("scalar is always available and listed first") {
    const auto all = available_kernels();
    REQUIRE_FALSE(all.empty());
    CHECK(all.front()->isa == Isa::Scalar);
  }
}
