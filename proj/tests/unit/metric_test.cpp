#include <cmath>
#include <map>
#include <queue>
#include <vector>

#include "doctest.h"
#include "dehn/metric.hpp"
#include "dehn/rng.hpp"
#include "dehn/stats.hpp"
#include "dehn/walk.hpp"

using namespace dehn;

namespace {

// Plain BFS over the Cayley graph, kept apart from the library's packed index.
std::map<GroupElement, int> bfs(const GroupSpec& s, int radius) {
  std::map<GroupElement, int> dist{{s.identity(), 0}};
  std::queue<GroupElement> q;
  q.push(s.identity());
  while (!q.empty()) {
    const GroupElement g = q.front();
    q.pop();
    const int d = dist[g];
    if (d == radius) continue;
    for (int i = 0; i < s.generator_count(); ++i)
      for (bool inv : {false, true}) {
        const GroupElement h = s.apply(g, Letter::gen(i, inv));
        if (dist.emplace(h, d + 1).second) q.push(h);
      }
  }
  return dist;
}

double census_slope(const std::vector<std::int64_t>& spheres, int r_min) {
  Curve c;
  std::int64_t ball = 0;
  for (std::size_t r = 0; r < spheres.size(); ++r) {
    ball += spheres[r];
    if (static_cast<int>(r) >= r_min) c.add(static_cast<double>(r), static_cast<double>(ball), 0, 1);
  }
  return exponent_fit(c).slope;
}

}  // namespace

TEST_SUITE("metric") {
  TEST_CASE("word metric examples") {
    const auto z2 = GroupSpec::free_abelian(2);
    CHECK(word_metric(z2, z2.identity(), z2.element(std::vector<std::int64_t>{3, -2}), 16) == 5);
    const auto h = GroupSpec::heisenberg3();
    CHECK(word_metric(h, h.identity(), h.element(std::vector<std::int64_t>{0, 0, 1}), 16) == 4);
    for (const char* id : {"z2", "heis3", "fnil2-3", "filiform4"}) {
      const auto s = GroupSpec::from_id(id);
      CHECK(word_metric(s, s.identity(), s.identity(), 4) == 0);
    }
  }

  TEST_CASE("cap exceeded is explicit") {
    const auto h = GroupSpec::heisenberg3();
    const WordMetric m(h, 6);
    CHECK_THROWS_AS(m.norm(h.element(std::vector<std::int64_t>{0, 0, 100})), CapExceeded);
    CHECK_FALSE(m.try_norm(h.element(std::vector<std::int64_t>{0, 0, 100})).has_value());
  }

  TEST_CASE("heisenberg profile agrees with BFS on the radius-10 ball") {
    const auto h = GroupSpec::heisenberg3();
    const auto oracle = bfs(h, 10);
    const HeisenbergProfile prof(10);
    for (const auto& [g, d] : oracle) CHECK(prof.distance(g[0], g[1], g[2]) == d);
    // and nothing outside the ball is reported inside it
    int outside = 0;
    for (int x = -10; x <= 10; ++x)
      for (int y = -10; y <= 10; ++y)
        for (int z = -30; z <= 30; ++z) {
          const auto g = h.element(std::vector<std::int64_t>{x, y, z});
          if (!oracle.count(g) && prof.distance(x, y, z)) ++outside;
        }
    CHECK(outside == 0);
  }

  TEST_CASE("library BFS agrees with the reference BFS") {
    for (const char* id : {"fnil2-3", "filiform4"}) {
      const auto s = GroupSpec::from_id(id);
      const auto oracle = bfs(s, 6);
      const BallIndex ball(s, 6);
      CHECK(ball.size() == oracle.size());
      for (const auto& [g, d] : oracle) CHECK(ball.distance(g) == d);
    }
  }

  TEST_CASE("ball census examples") {
    const auto z2 = ball_census(GroupSpec::free_abelian(2), 2);
    CHECK(z2[0] == 1);
    CHECK(z2[0] + z2[1] == 5);
    CHECK(z2[0] + z2[1] + z2[2] == 13);
    const auto h = ball_census(GroupSpec::heisenberg3(), 2);
    CHECK(h[0] + h[1] == 5);
    CHECK(h[0] + h[1] + h[2] == 17);
    for (const char* id : {"z3", "fnil2-3", "filiform4"}) CHECK(ball_census(GroupSpec::from_id(id), 0)[0] == 1);
  }

  TEST_CASE("growth degree cross-checked by census fits") {
    // fit window r = 8..12
    CHECK(std::fabs(census_slope(ball_census(GroupSpec::heisenberg3(), 12), 8) - 4.0) <= 0.3);
    CHECK(std::fabs(census_slope(ball_census(GroupSpec::filiform4(), 12), 8) - 7.0) <= 0.7);
    CHECK(std::fabs(census_slope(ball_census(GroupSpec::free_abelian(2), 40), 4) - 2.0) <= 0.1);
  }

  TEST_CASE("geodesics") {
    const auto z2 = GroupSpec::free_abelian(2);
    CHECK(format_word(geodesic(z2, z2.identity(), z2.element(std::vector<std::int64_t>{1, 1}))) == "ab");
    CHECK(geodesic(z2, z2.identity(), z2.identity()).empty());
    for (const char* id : {"z2", "heis3", "filiform4"}) {
      const auto s = GroupSpec::from_id(id);
      const auto m = shared_metric(s, 12);
      CounterRng rng(9, 0);
      for (int i = 0; i < 100; ++i) {
        const auto x = eval_word(s, sample_lazy_word(s, 6, rng));
        const auto y = eval_word(s, sample_lazy_word(s, 6, rng));
        const Word g = m->geodesic(x, y);
        CHECK(static_cast<int>(g.size()) == m->distance(x, y));
        CHECK(s.multiply(x, eval_word(s, g)) == y);
        CHECK(m->geodesic(y, x) == inverse_word(g));
      }
    }
  }

  TEST_CASE("left invariance and triangle inequality") {
    for (const char* id : {"z2", "heis3", "fnil2-3", "filiform4"}) {
      const auto s = GroupSpec::from_id(id);
      const auto m = shared_metric(s, 10);
      CounterRng rng(10, 0);
      for (int i = 0; i < 200; ++i) {
        const auto g = eval_word(s, sample_lazy_word(s, 4, rng));
        const auto x = eval_word(s, sample_lazy_word(s, 4, rng));
        const auto y = eval_word(s, sample_lazy_word(s, 4, rng));
        const auto z = eval_word(s, sample_lazy_word(s, 4, rng));
        CHECK(m->distance(s.multiply(g, x), s.multiply(g, y)) == m->distance(x, y));
        CHECK(m->distance(x, z) <= m->distance(x, y) + m->distance(y, z));
      }
    }
  }

  TEST_CASE("trace prefixes are 1-Lipschitz") {
    const auto h = GroupSpec::heisenberg3();
    const auto m = shared_metric(h, 20);
    CounterRng rng(12, 0);
    for (int k = 0; k < 20; ++k) {
      const auto t = trace(h, sample_lazy_word(h, 20, rng));
      for (int i = 0; i <= 20; ++i)
        for (int j = i; j <= 20; ++j) CHECK(m->distance(t.prefixes[i], t.prefixes[j]) <= j - i);
    }
  }
}
