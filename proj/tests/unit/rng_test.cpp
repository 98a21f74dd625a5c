#include <vector>

#include "doctest.h"
#include "dehn/rng.hpp"
#include "dehn/stats.hpp"
#include "dehn/walk.hpp"

using namespace dehn;

TEST_SUITE("rng") {
  TEST_CASE("philox4x32-10 known answers") {
    using B = std::array<std::uint32_t, 4>;
    CHECK(CounterRng::block({0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(CounterRng::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(CounterRng::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  }

  TEST_CASE("streams are reproducible and distinct") {
    CounterRng a(1, 2), b(1, 2), c(1, 3);
    std::vector<std::uint64_t> va, vb, vc;
    for (int i = 0; i < 16; ++i) va.push_back(a()), vb.push_back(b()), vc.push_back(c());
    CHECK(va == vb);
    CHECK(va != vc);
  }

  TEST_CASE("below and uniform01 ranges") {
    CounterRng r(4, 0);
    for (int i = 0; i < 10000; ++i) {
      CHECK(r.below(7) < 7);
      const double u = r.uniform01();
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
    }
  }

  TEST_CASE("lazy word letters are uniform") {
    for (int d : {1, 2, 3}) {
      const auto s = GroupSpec::free_abelian(d);
      CounterRng r(5, static_cast<std::uint64_t>(d));
      std::vector<std::int64_t> hist(2 * d + 1, 0);
      for (int i = 0; i < 1000; ++i)
        for (Letter l : sample_lazy_word(s, 100, r)) ++hist[letter_index(l)];
      CHECK(chi_square_gof(hist, std::vector<double>(hist.size(), 1.0)).p_value > 0.001);
    }
    CounterRng r(1, 1);
    CHECK(sample_lazy_word(GroupSpec::free_abelian(2), 0, r).empty());
    CounterRng x(8, 8), y(8, 8);
    CHECK(sample_lazy_word(GroupSpec::heisenberg3(), 50, x) == sample_lazy_word(GroupSpec::heisenberg3(), 50, y));
  }
}
