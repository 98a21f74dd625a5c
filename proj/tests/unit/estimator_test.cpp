#include <cmath>
#include <cstdlib>
#include <map>
#include <vector>

#include "doctest.h"
#include "dehn/estimator.hpp"
#include "dehn/metric.hpp"

using namespace dehn;

namespace {

// All lazy loops of length n in Z^d by odometer, with L1 prefix norms.
struct Brute {
  std::vector<std::vector<int>> loops;  // letter indices
  std::vector<std::map<int, std::uint64_t>> dist;
  Brute(int d, int n) : dist(static_cast<std::size_t>(n) + 1) {
    const int width = 2 * d + 1;
    std::vector<int> dig(static_cast<std::size_t>(n), 0);
    for (;;) {
      std::vector<int> pos(static_cast<std::size_t>(d), 0);
      std::vector<int> norms{0};
      for (int u : dig) {
        if (u) pos[static_cast<std::size_t>((u - 1) / 2)] += (u - 1) % 2 ? -1 : 1;
        int l1 = 0;
        for (int p : pos) l1 += std::abs(p);
        norms.push_back(l1);
      }
      if (norms.back() == 0) {
        loops.push_back(dig);
        for (int t = 0; t <= n; ++t) ++dist[static_cast<std::size_t>(t)][norms[static_cast<std::size_t>(t)]];
      }
      int i = n - 1;
      while (i >= 0 && ++dig[static_cast<std::size_t>(i)] == width) dig[static_cast<std::size_t>(i--)] = 0;
      if (i < 0) break;
    }
  }
};

}  // namespace

TEST_SUITE("estimator") {
  TEST_CASE("exponent fit") {
    Curve c;
    c.add(2, 4, 0, 1);
    c.add(4, 16, 0, 1);
    c.add(8, 64, 0, 1);
    CHECK(exponent_fit(c).slope == doctest::Approx(2.0).epsilon(1e-12));
    Curve flat;
    for (double s : {1.0, 2.0, 4.0, 8.0}) flat.add(s, 3, 0.1, 10);
    CHECK(std::fabs(exponent_fit(flat).slope) <= 1e-12);
    Curve noisy, scaled;
    const double v[] = {1.3, 2.9, 4.1, 9.2, 15.0};
    const double e[] = {0.1, 0.2, 0.2, 0.5, 0.9};
    for (int i = 0; i < 5; ++i) {
      noisy.add(1 << i, v[i], e[i], 100);
      scaled.add(1 << i, 7 * v[i], 7 * e[i], 100);
    }
    const auto a = exponent_fit(noisy), b = exponent_fit(scaled);
    CHECK(std::fabs(a.slope - b.slope) <= 1e-12);
    CHECK(b.intercept == doctest::Approx(a.intercept + std::log(7.0)));
    Curve neg;
    neg.add(1, 1, 0, 1);
    neg.add(2, 0, 0, 1);
    neg.add(3, 1, 0, 1);
    CHECK_THROWS_AS(exponent_fit(neg), DomainError);
    Curve two;
    two.add(1, 1, 0, 1);
    two.add(2, 2, 0, 1);
    CHECK_THROWS_AS(exponent_fit(two), DomainError);
    CHECK_THROWS_AS(two.add(2, 3, 0, 1), DomainError);
  }

  TEST_CASE("first point dropped when noisy") {
    Curve c;
    c.add(1, 1, 0.5, 4);
    c.add(2, 2, 0.01, 100);
    c.add(4, 4, 0.01, 100);
    c.add(8, 8, 0.01, 100);
    const auto f = exponent_fit(c);
    CHECK(f.dropped_first);
    CHECK(f.points_used == 3);
  }

  TEST_CASE("summaries and tests") {
    const std::vector<double> x{1, 2, 3, 4};
    const Summary s = summarize(x);
    CHECK(s.mean == 2.5);
    CHECK(s.variance == doctest::Approx(5.0 / 3));
    CHECK(s.stderr_ == doctest::Approx(std::sqrt(5.0 / 12)));
    CHECK(kolmogorov_q(0) == 1.0);
    CHECK(kolmogorov_q(1.36) == doctest::Approx(0.049).epsilon(0.01));
    const std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, b{11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
    CHECK(ks_two_sample(a, b).statistic == 1.0);
    CHECK(ks_two_sample(a, a).p_value == doctest::Approx(1.0));
    const std::vector<std::int64_t> obs{10, 10, 10};
    CHECK(chi_square_gof(obs, std::vector<double>{1, 1, 1}).statistic == 0.0);
  }

  TEST_CASE("enumeration examples") {
    const auto z2 = GroupSpec::free_abelian(2);
    CHECK(enumerate_loops(z2, 2).loop_count() == 5);
    const auto z1 = enumerate_loops(GroupSpec::free_abelian(1), 2);
    REQUIRE(z1.loop_count() == 3);
    CHECK(format_word(z1.loops[0]) == "..");
    CHECK(format_word(z1.loops[1]) == "aA");
    CHECK(format_word(z1.loops[2]) == "Aa");
    const auto e0 = enumerate_loops(z2, 0);
    CHECK(e0.loop_count() == 1);
    CHECK(exact_mean(e0, [](const LazyWord& w) { return winding_area(w); }).first == 0);
    CHECK_THROWS_AS(enumerate_loops(z2, 30), BudgetExceeded);
  }

  TEST_CASE("enumeration matches brute force") {
    for (int d : {1, 2, 3}) {
      const int n = d == 3 ? 5 : 7;
      const Brute oracle(d, n);
      const auto e = enumerate_loops(GroupSpec::free_abelian(d), n);
      CHECK(e.loop_count() == oracle.loops.size());
      for (std::size_t i = 0; i < oracle.loops.size() && i < e.loops.size(); ++i) {
        std::vector<int> idx;
        for (Letter l : e.loops[i]) idx.push_back(letter_index(l));
        CHECK(idx == oracle.loops[i]);
      }
      CHECK(e.distance == oracle.dist);
    }
  }

  TEST_CASE("exact average winding area at n = 4") {
    // brute force: 61 loops, the 8 unit squares contribute area 1 each
    const auto e = enumerate_loops(GroupSpec::free_abelian(2), 4);
    const auto [num, den] = exact_mean(e, [](const LazyWord& w) { return winding_area(w); });
    CHECK(den == 61);
    CHECK(num == 8);
    MonteCarloOptions o;
    o.samples = 20000;
    o.sampler = SamplerChoice::Rejection;
    o.workers = 2;
    const auto rep = avg_area_curve(GroupSpec::free_abelian(2), {4}, AreaFn::Winding, o);
    CHECK(std::fabs(rep.curve.points[0].value - 8.0 / 61) <= 3 * rep.curve.points[0].stderr_);
  }

  TEST_CASE("no loops means an error, never a zero") {
    MonteCarloOptions o;
    o.samples = 4;
    o.sampler = SamplerChoice::Rejection;
    o.max_attempts = 1;
    CHECK_THROWS_AS(avg_area_curve(GroupSpec::heisenberg3(), {101}, AreaFn::Centralized, o), SamplerFailure);
  }

  TEST_CASE("moment curve") {
    const auto z2 = GroupSpec::free_abelian(2);
    MonteCarloOptions o;
    o.samples = 3000;
    o.sampler = SamplerChoice::Bridge;
    o.workers = 2;
    const auto rep = moment_curve(z2, 64, {0, 16, 48}, 1, o);
    CHECK(rep.curve.points[0].value == 0.0);
    const auto& p16 = rep.curve.points[1];
    const auto& p48 = rep.curve.points[2];
    CHECK(std::fabs(p16.value - p48.value) <= 3 * std::hypot(p16.stderr_, p48.stderr_));
    CHECK_THROWS_AS(moment_curve(z2, 64, {64}, 1, o), DomainError);
    for (const auto& p : avg_area_curve(z2, {8, 16}, AreaFn::Winding, o).curve.points) CHECK(p.value >= 0);
  }

  TEST_CASE("moment curve matches enumeration at n = 6") {
    const auto z2 = GroupSpec::free_abelian(2);
    const Brute oracle(2, 6);
    MonteCarloOptions o;
    o.samples = 20000;
    o.sampler = SamplerChoice::Bridge;
    const auto rep = moment_curve(z2, 6, {1, 2, 3}, 2, o);
    for (const auto& p : rep.curve.points) {
      double num = 0, den = 0;
      for (const auto& [r, k] : oracle.dist[static_cast<std::size_t>(p.scale)]) {
        num += static_cast<double>(r * r) * static_cast<double>(k);
        den += static_cast<double>(k);
      }
      CHECK(std::fabs(p.value - num / den) <= 3 * p.stderr_);
    }
  }

  TEST_CASE("central moments") {
    MonteCarloOptions o;
    o.samples = 500;
    const auto rep = central_moment_curve(GroupSpec::free_abelian(2), {1, 2}, o);
    CHECK(rep.curve.points[0].value == 0.0);
    CHECK_THROWS_AS(central_moment_curve(GroupSpec::filiform4(), {4}, o), Unsupported);
  }

  TEST_CASE("lower proxy below upper proxy") {
    for (const char* id : {"z2", "heis3"}) {
      MonteCarloOptions o;
      o.samples = 200;
      o.workers = 2;
      const auto s = GroupSpec::from_id(id);
      const auto lo = avg_area_curve(s, {16, 32}, AreaFn::Centralized, o);
      const auto hi = avg_area_curve(s, {16, 32}, AreaFn::Dyadic, o);
      for (std::size_t i = 0; i < 2; ++i) CHECK(lo.curve.points[i].value <= hi.curve.points[i].value);
    }
  }

  TEST_CASE("shift invariance") {
    const auto z2 = GroupSpec::free_abelian(2);
    for (int t = 1; t <= 6; ++t)
      for (int s = 0; s < t; ++s) CHECK(shift_invariance_test(z2, 6, s, t, ShiftMode::Exact).identical);
    MonteCarloOptions o;
    o.samples = 2000;
    o.workers = 2;
    CHECK(shift_invariance_test(z2, 32, 0, 9, ShiftMode::Sampled, o).ks.p_value > 0.001);
    CHECK_THROWS_AS(shift_invariance_test(z2, 6, 3, 3, ShiftMode::Exact), DomainError);
  }

  TEST_CASE("ratio limit") {
    const auto z2 = GroupSpec::free_abelian(2);
    const std::vector<GroupElement> xs{z2.identity(), eval_word(z2, parse_word("ab")),
                                       eval_word(z2, parse_word("aaaaaaaaaa"))};
    const auto rep = ratio_limit_check(z2, xs, {4, 64, 512});
    for (const auto& [n, r] : rep[0].ratios) CHECK(r == 1.0);
    CHECK(std::fabs(rep[1].ratios.back().second - 1) <= 0.1);
    CHECK(rep[2].missing == std::vector<int>{4});
  }

  TEST_CASE("reproducible across worker counts") {
    const auto h = GroupSpec::heisenberg3();
    MonteCarloOptions o;
    o.samples = 300;
    o.seed = 42;
    o.workers = 1;
    const auto a = central_moment_curve(h, {16, 32}, o);
    o.workers = 4;
    const auto b = central_moment_curve(h, {16, 32}, o);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(a.curve.points[i].value == b.curve.points[i].value);
      CHECK(a.curve.points[i].stderr_ == b.curve.points[i].stderr_);
    }
  }

  TEST_CASE("worker count from the environment") {
    setenv("DEHNLAB_WORKERS", "3", 1);
    CHECK(default_workers() == 3);
    unsetenv("DEHNLAB_WORKERS");
    CHECK(default_workers() >= 1);
  }

  TEST_CASE("parallel_for rethrows the lowest failing index") {
    try {
      parallel_for(100, 4, [](std::size_t i) {
        if (i == 17 || i == 60) throw DomainError(std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()) == "17");
    }
  }
}
