#include <array>
#include <vector>

#include "doctest.h"
#include "dehn/group.hpp"
#include "dehn/rng.hpp"
#include "dehn/walk.hpp"

using namespace dehn;

namespace {

GroupElement el(const GroupSpec& s, std::vector<std::int64_t> c) { return s.element(c); }

// Reference products written out per chart, independent of the library.
std::vector<std::int64_t> heis_mul(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]};
}

// J^m v for the unipotent Jordan block acting on (v1, v2, v3): J e1 = e1, J e2 = e1 + e2, J e3 = e2 + e3.
std::array<std::int64_t, 3> jordan_pow(std::int64_t m, std::array<std::int64_t, 3> v) {
  const std::int64_t c2 = m * (m - 1) / 2;
  return {v[0] + m * v[1] + c2 * v[2], v[1] + m * v[2], v[2]};
}

std::vector<std::int64_t> fili_mul(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  const auto jv = jordan_pow(a[3], {b[0], b[1], b[2]});
  return {a[0] + jv[0], a[1] + jv[1], a[2] + jv[2], a[3] + b[3]};
}

std::vector<std::int64_t> coords(const GroupElement& g) { return {g.view().begin(), g.view().end()}; }

}  // namespace

TEST_SUITE("group") {
  TEST_CASE("eval_word examples") {
    const auto h = GroupSpec::heisenberg3();
    CHECK(eval_word(h, parse_word("abAB")) == el(h, {0, 0, 1}));
    for (const char* id : {"z2", "z3", "heis3", "fnil2-3", "filiform4"}) {
      const auto s = GroupSpec::from_id(id);
      CHECK(s.is_identity(eval_word(s, Word{})));
    }
    const auto z2 = GroupSpec::free_abelian(2);
    CHECK(eval_word(z2, parse_word("aab")) == el(z2, {2, 1}));
  }

  TEST_CASE("eval_word rejects letters outside the group") {
    CHECK_THROWS_AS(eval_word(GroupSpec::free_abelian(2), parse_word("ac")), InvalidWord);
    CHECK_THROWS_AS(parse_word("a-b"), InvalidWord);
  }

  TEST_CASE("trace examples") {
    const auto z1 = GroupSpec::free_abelian(1);
    const auto t = trace(z1, parse_word("a.A"));
    REQUIRE(t.prefixes.size() == 4);
    CHECK(t.prefixes[0] == el(z1, {0}));
    CHECK(t.prefixes[1] == el(z1, {1}));
    CHECK(t.prefixes[2] == el(z1, {1}));
    CHECK(t.prefixes[3] == el(z1, {0}));
    const auto h = GroupSpec::heisenberg3();
    const auto th = trace(h, parse_word("ab"));
    CHECK(th.prefixes[1] == el(h, {1, 0, 0}));
    CHECK(th.prefixes[2] == el(h, {1, 1, 1}));
    CHECK(trace(h, Word{}).prefixes.size() == 1);
  }

  TEST_CASE("products match the coordinate charts") {
    const auto h = GroupSpec::heisenberg3();
    const auto f = GroupSpec::filiform4();
    CounterRng rng(3, 0);
    auto r = [&] { return static_cast<std::int64_t>(rng.below(41)) - 20; };
    for (int i = 0; i < 2000; ++i) {
      const std::vector<std::int64_t> a{r(), r(), r()}, b{r(), r(), r()};
      CHECK(coords(h.multiply(el(h, a), el(h, b))) == heis_mul(a, b));
      const std::vector<std::int64_t> fa{r(), r(), r(), r()}, fb{r(), r(), r(), r()};
      CHECK(coords(f.multiply(el(f, fa), el(f, fb))) == fili_mul(fa, fb));
    }
  }

  TEST_CASE("filiform generators give the class-3 commutators") {
    const auto f = GroupSpec::filiform4();
    // t = a, s = b
    CHECK(eval_word(f, commutator(parse_word("a"), parse_word("b"))) == el(f, {0, 1, 0, 0}));
    const Word ts = commutator(parse_word("a"), parse_word("b"));
    CHECK(eval_word(f, commutator(parse_word("a"), ts)) == el(f, {1, 0, 0, 0}));
  }

  TEST_CASE("group axioms on 10^4 random triples") {
    for (const char* id : {"z2", "z3", "heis3", "fnil2-3", "filiform4"}) {
      const auto s = GroupSpec::from_id(id);
      CounterRng rng(11, 0);
      int bad = 0;
      for (int i = 0; i < 10000; ++i) {
        const auto x = eval_word(s, sample_lazy_word(s, 10, rng));
        const auto y = eval_word(s, sample_lazy_word(s, 10, rng));
        const auto z = eval_word(s, sample_lazy_word(s, 10, rng));
        bad += s.multiply(s.multiply(x, y), z) != s.multiply(x, s.multiply(y, z));
        bad += s.multiply(x, s.identity()) != x || s.multiply(s.identity(), x) != x;
        bad += !s.is_identity(s.multiply(x, s.inverse(x))) || !s.is_identity(s.multiply(s.inverse(x), x));
      }
      INFO(id);
      CHECK(bad == 0);
    }
  }

  TEST_CASE("relators evaluate to the identity") {
    for (const char* id : {"z1", "z2", "z3", "z4", "heis3", "fnil2-2", "fnil2-3", "fnil2-4", "filiform4"}) {
      const auto s = GroupSpec::from_id(id);
      for (const auto& r : s.relators()) CHECK(s.is_identity(eval_word(s, r)));
    }
  }

  TEST_CASE("presentation sizes") {
    CHECK(GroupSpec::free_abelian(3).relators().size() == 3);
    CHECK(GroupSpec::heisenberg3().relators().size() == 2);
    CHECK(GroupSpec::heisenberg3().generator_count() == 2);
    CHECK(GroupSpec::filiform4().generator_count() == 2);
    CHECK(GroupSpec::free_nilpotent2(3).generator_count() == 3);
    CHECK(GroupSpec::free_nilpotent2(3).arity() == 6);
  }

  TEST_CASE("quotient maps are homomorphisms") {
    const auto f = GroupSpec::filiform4();
    const auto h = GroupSpec::heisenberg3();
    const auto z2 = GroupSpec::free_abelian(2);
    CounterRng rng(5, 1);
    for (int i = 0; i < 2000; ++i) {
      const auto x = eval_word(f, sample_lazy_word(f, 12, rng));
      const auto y = eval_word(f, sample_lazy_word(f, 12, rng));
      CHECK(filiform_to_heisenberg(f.multiply(x, y)) ==
            h.multiply(filiform_to_heisenberg(x), filiform_to_heisenberg(y)));
      const auto u = eval_word(h, sample_lazy_word(h, 12, rng));
      const auto v = eval_word(h, sample_lazy_word(h, 12, rng));
      CHECK(heisenberg_to_z2(h.multiply(u, v)) == z2.multiply(heisenberg_to_z2(u), heisenberg_to_z2(v)));
    }
  }

  TEST_CASE("words map through the quotients letter by letter") {
    const auto f = GroupSpec::filiform4();
    const auto h = GroupSpec::heisenberg3();
    CounterRng rng(6, 0);
    for (int i = 0; i < 500; ++i) {
      const Word w = sample_lazy_word(f, 20, rng);
      CHECK(filiform_to_heisenberg(eval_word(f, w)) == eval_word(h, w));
    }
  }

  TEST_CASE("overflow is an error") {
    const auto h = GroupSpec::heisenberg3();
    const auto big = el(h, {std::int64_t{1} << 40, 0, 0});
    const auto big_y = el(h, {0, std::int64_t{1} << 40, 0});
    CHECK_THROWS_AS(h.multiply(big, big_y), OverflowError);
  }

  TEST_CASE("catalog ids") {
    CHECK(GroupSpec::from_id("z2").generator_count() == 2);
    CHECK(GroupSpec::from_id("fnil2-3").kind() == GroupKind::FreeNilpotentClass2);
    CHECK_THROWS_AS(GroupSpec::from_id("z9"), DomainError);
    CHECK_THROWS_AS(GroupSpec::from_id("heis4"), DomainError);
    CHECK_THROWS_AS(GroupSpec::from_id("z"), DomainError);
  }

  TEST_CASE("growth degrees") {
    CHECK(GroupSpec::free_abelian(2).growth_degree() == 2);
    CHECK(GroupSpec::heisenberg3().growth_degree() == 4);
    CHECK(GroupSpec::free_nilpotent2(3).growth_degree() == 9);
    CHECK(GroupSpec::filiform4().growth_degree() == 7);
  }

  TEST_CASE("word helpers") {
    CHECK(format_word(free_reduce(parse_word("aA.bBb"))) == "b");
    CHECK(format_word(inverse_word(parse_word("abA"))) == "aBA");
    Word acc = parse_word("ab");
    append_reduced(acc, parse_word("Ba"));
    CHECK(format_word(acc) == "aa");
    CHECK(format_word(commutator(parse_word("a"), parse_word("b"))) == "abAB");
  }
}
