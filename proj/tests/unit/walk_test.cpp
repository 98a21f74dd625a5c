#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "dehn/metric.hpp"
#include "dehn/stats.hpp"
#include "dehn/walk.hpp"

using namespace dehn;

namespace {

// Endpoint counts of all (2d+1)^n lazy words, by odometer enumeration.
std::map<GroupElement, std::uint64_t> endpoint_counts(const GroupSpec& s, int n) {
  const int width = 2 * s.generator_count() + 1;
  std::vector<int> digit(static_cast<std::size_t>(n), 0);
  std::map<GroupElement, std::uint64_t> out;
  for (;;) {
    GroupElement g = s.identity();
    for (int u : digit) {
      if (u == 0) continue;
      g = s.multiply(g, s.letter_element(Letter::gen((u - 1) / 2, (u - 1) % 2 == 1)));
    }
    ++out[g];
    int i = 0;
    while (i < n && ++digit[static_cast<std::size_t>(i)] == width) digit[static_cast<std::size_t>(i++)] = 0;
    if (i == n) break;
  }
  return out;
}

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

ProbabilityTable power(const GroupSpec& s, int n) {
  const StepMeasure m = step_measure(s);
  ProbabilityTable t = ProbabilityTable::delta(s);
  while (t.step_count() < n) t = convolve(t, m);
  return t;
}

}  // namespace

TEST_SUITE("walk") {
  TEST_CASE("step measures") {
    const auto z2 = step_measure(GroupSpec::free_abelian(2));
    CHECK(z2.size() == 5);
    for (double p : z2.probabilities) CHECK(p == doctest::Approx(0.2));
    CHECK(format_word(z2.letters) == ".aAbB");
    CHECK(step_measure(GroupSpec::heisenberg3()).size() == 5);
    const auto z1 = step_measure(GroupSpec::free_abelian(1));
    CHECK(z1.size() == 3);
    for (double p : z1.probabilities) CHECK(p == doctest::Approx(1.0 / 3));
  }

  TEST_CASE("convolution of the delta is the step measure") {
    for (const char* id : {"z2", "heis3", "filiform4"}) {
      const auto s = GroupSpec::from_id(id);
      const auto m = step_measure(s);
      const auto t = convolve(ProbabilityTable::delta(s), m);
      CHECK(t.support_size() == m.size());
      for (std::size_t i = 0; i < m.size(); ++i) CHECK(t.at(m.elements[i]) == doctest::Approx(m.probabilities[i]));
    }
  }

  TEST_CASE("two-step return probabilities from pair enumeration") {
    const auto z2 = GroupSpec::free_abelian(2);
    const auto c2 = endpoint_counts(z2, 2);
    CHECK(c2.at(z2.identity()) == 5);
    CHECK(power(z2, 2).at(z2.identity()) == doctest::Approx(5.0 / 25));
    const auto z1 = GroupSpec::free_abelian(1);
    CHECK(endpoint_counts(z1, 2).at(z1.identity()) == 3);
    CHECK(power(z1, 2).at(z1.identity()) == doctest::Approx(3.0 / 9));
  }

  TEST_CASE("float tables match full enumeration") {
    for (const char* id : {"z2", "heis3", "fnil2-3"}) {
      const auto s = GroupSpec::from_id(id);
      const int n = s.generator_count() == 3 ? 5 : 7;
      const auto oracle = endpoint_counts(s, n);
      const auto t = power(s, n);
      const double denom = static_cast<double>(ipow(2 * s.generator_count() + 1, n));
      CHECK(t.support_size() == oracle.size());
      for (const auto& [g, c] : oracle) CHECK(t.at(g) == doctest::Approx(c / denom).epsilon(1e-12));
    }
  }

  TEST_CASE("exact tables equal path enumeration up to n = 8") {
    for (const char* id : {"z2", "heis3"}) {
      const auto s = GroupSpec::from_id(id);
      ExactTable t(s);
      for (int n = 1; n <= 8; ++n) {
        t.step();
        const auto oracle = endpoint_counts(s, n);
        CHECK(t.denominator() == ipow(5, n));
        CHECK(t.counts().size() == oracle.size());
        bool same = true;
        for (const auto& [g, c] : oracle) same = same && t.count(g) == c;
        CHECK(same);
      }
    }
  }

  TEST_CASE("return tables") {
    const auto z2 = GroupSpec::free_abelian(2);
    const auto rt = return_tables(z2, 16);
    CHECK(rt.horizon() == 16);
    CHECK(rt.p(0, z2.identity()) == 1.0);
    CHECK(rt.p(4, z2.identity()) == doctest::Approx(endpoint_counts(z2, 4).at(z2.identity()) / 625.0));
    const auto m = shared_metric(z2, 16);
    for (int t = 0; t <= 16; ++t) {
      bool inside = true;
      rt.tables[t].for_each([&](const GroupElement& g, double) { inside = inside && m->norm(g) <= t; });
      CHECK(inside);
    }
    CHECK_THROWS_AS(return_tables(GroupSpec::heisenberg3(), 64, 1000), BudgetExceeded);
  }

  TEST_CASE("mass conservation and symmetry") {
    for (const char* id : {"z2", "heis3"}) {
      const auto s = GroupSpec::from_id(id);
      const auto m = step_measure(s);
      ProbabilityTable t = ProbabilityTable::delta(s);
      for (int n = 1; n <= 40; ++n) {
        const double lost_before = t.lost_mass();
        t = convolve(t, m);
        CHECK(t.total_mass() + t.lost_mass() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(t.lost_mass() >= lost_before);
      }
      double worst = 0;
      t.for_each([&](const GroupElement& g, double p) { worst = std::max(worst, std::fabs(p - t.at(s.inverse(g)))); });
      CHECK(worst <= 1e-12);
    }
  }

  TEST_CASE("parity classes on the line") {
    const auto z1 = GroupSpec::free_abelian(1);
    const auto t = power(z1, 9);
    CHECK(t.support_size() == 19);
  }

  TEST_CASE("csv export") {
    const auto z2 = GroupSpec::free_abelian(2);
    std::ostringstream out;
    write_csv(out, power(z2, 1));
    const std::string s = out.str();
    CHECK(s.rfind("c0,c1,probability\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 6);
    CHECK(s.find("0,0,0.20000000000000001") != std::string::npos);
  }

  TEST_CASE("rejection sampler: n = 2 loops are uniform") {
    const auto z2 = GroupSpec::free_abelian(2);
    std::map<std::string, std::int64_t> hist;
    for (std::uint64_t i = 0; i < 20000; ++i) {
      CounterRng rng(1, i);
      const auto s = sample_loop_rejection(z2, 2, rng);
      CHECK(z2.is_identity(eval_word(z2, s.word)));
      ++hist[format_word(s.word)];
    }
    REQUIRE(hist.size() == 5);
    for (const char* w : {"..", "aA", "Aa", "bB", "Bb"}) CHECK(hist.count(w) == 1);
    std::vector<std::int64_t> obs;
    for (const auto& [w, c] : hist) obs.push_back(c);
    CHECK(chi_square_gof(obs, std::vector<double>(5, 1.0)).p_value > 0.001);
  }

  TEST_CASE("rejection sampler: w(2) at n = 4 matches enumeration") {
    const auto z2 = GroupSpec::free_abelian(2);
    // conditional law of w(2) given w(4) = e, from all 5^4 words
    std::map<GroupElement, double> expect;
    const auto c2 = endpoint_counts(z2, 2);
    for (const auto& [g, c] : c2) expect[g] = static_cast<double>(c) * static_cast<double>(c2.count(z2.inverse(g)) ? c2.at(z2.inverse(g)) : 0);
    std::map<GroupElement, std::int64_t> hist;
    for (std::uint64_t i = 0; i < 20000; ++i) {
      CounterRng rng(2, i);
      ++hist[sample_loop_rejection(z2, 4, rng).trace.prefixes[2]];
    }
    std::vector<std::int64_t> obs;
    std::vector<double> exp;
    for (const auto& [g, e] : expect) {
      obs.push_back(hist.count(g) ? hist[g] : 0);
      exp.push_back(e);
    }
    CHECK(chi_square_gof(obs, exp).p_value > 0.001);
  }

  TEST_CASE("sampler failure carries the attempt count") {
    CounterRng rng(1, 1);
    try {
      sample_loop_rejection(GroupSpec::heisenberg3(), 200, rng, 3);
      FAIL("expected SamplerFailure");
    } catch (const SamplerFailure& e) {
      CHECK(e.attempts() == 3);
    }
  }

  TEST_CASE("bridge transition probabilities") {
    const auto z2 = GroupSpec::free_abelian(2);
    const auto rt = return_tables(z2, 2);
    const auto m = step_measure(z2);
    for (const auto& g : m.elements) CHECK(hat_p(z2, z2.identity(), g, 0, 2, rt) == doctest::Approx(0.2));
    const auto rt8 = return_tables(z2, 8);
    const auto x = eval_word(z2, parse_word("aa"));
    double total = 0;
    for (const auto& g : m.elements) total += hat_p(z2, x, z2.multiply(x, g), 3, 8, rt8);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(hat_p(z2, eval_word(z2, parse_word("aaaaaaa")), z2.identity(), 3, 8, rt8), DomainError);
    CHECK_THROWS_AS(hat_p(z2, z2.identity(), z2.identity(), 8, 8, rt8), DomainError);
  }

  TEST_CASE("bridge kernel tends to the step measure") {
    const auto z2 = GroupSpec::free_abelian(2);
    const auto rt = return_tables(z2, 512);
    const auto x = eval_word(z2, parse_word("a"));
    const auto y = eval_word(z2, parse_word("ab"));
    CHECK(std::fabs(hat_p(z2, x, y, 0, 512, rt) - 0.2) <= 0.02);
  }

  TEST_CASE("bridge output is always a loop of the right length") {
    const auto h = GroupSpec::heisenberg3();
    const auto rt = return_tables(h, 24);
    for (std::uint64_t i = 0; i < 200; ++i) {
      CounterRng rng(3, i);
      const auto s = sample_loop_bridge(h, 24, rng, rt);
      CHECK(s.word.size() == 24);
      CHECK(h.is_identity(eval_word(h, s.word)));
      CHECK(s.trace.prefixes.back() == h.identity());
    }
  }

  TEST_CASE("bridge, projected and rejection agree in distribution") {
    const auto h = GroupSpec::heisenberg3();
    const int n = 16;
    const auto rt = return_tables(h, n);
    const auto ab = return_tables(GroupSpec::free_abelian(2), n);
    const auto m = shared_metric(h, n);
    for (int t : {4, 8, 12}) {
      std::vector<double> a, b, c;
      for (std::uint64_t i = 0; i < 3000; ++i) {
        CounterRng r1(4, i), r2(5, i), r3(6, i);
        a.push_back(m->norm(sample_loop_bridge(h, n, r1, rt).trace.prefixes[t]));
        b.push_back(m->norm(sample_loop_rejection(h, n, r2).trace.prefixes[t]));
        c.push_back(m->norm(sample_loop_projected(h, n, r3, ab).trace.prefixes[t]));
      }
      CHECK(ks_two_sample(a, b).p_value > 0.001);
      CHECK(ks_two_sample(c, b).p_value > 0.001);
    }
  }

  TEST_CASE("heat kernel report") {
    const auto z2 = GroupSpec::free_abelian(2);
    const auto pts = heat_kernel_at_identity(z2, {2, 4});
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].p_identity == doctest::Approx(0.2));
    CHECK(pts[1].p_identity == doctest::Approx(endpoint_counts(z2, 4).at(z2.identity()) / 625.0));
    const auto rep = hsc_check(z2, {16, 32, 64});
    CHECK(rep.growth_degree == 2);
    for (const auto& p : rep.points) CHECK(p.upper_violations == 0);
  }
}
