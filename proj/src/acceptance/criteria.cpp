#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_map>

#include "dehn/acceptance.hpp"
#include "dehn/error.hpp"
#include "dehn/estimator.hpp"
#include "dehn/filling.hpp"
#include "dehn/metric.hpp"
#include "dehn/walk.hpp"

namespace dehn {

SuiteLevel parse_suite_level(const std::string& s) {
  if (s == "smoke") return SuiteLevel::Smoke;
  if (s == "desk") return SuiteLevel::Desk;
  throw DomainError("unknown suite level '" + s + "' (expected smoke or desk)");
}

const char* to_string(SuiteLevel level) { return level == SuiteLevel::Smoke ? "smoke" : "desk"; }

std::string summary_line(const CriterionResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%.1f s, limit %.0f s)", r.seconds, r.time_limit);
  return std::string(r.pass ? "PASS" : "FAIL") + " criterion " + r.id + " " + r.title + buf;
}

namespace {

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

struct Ctx {
  SuiteLevel level;
  std::uint64_t seed;
  int workers;
  bool desk() const { return level == SuiteLevel::Desk; }
  MonteCarloOptions mc(SamplerChoice s, std::size_t samples) const {
    MonteCarloOptions o;
    o.sampler = s;
    o.samples = samples;
    o.seed = seed;
    o.workers = workers;
    return o;
  }
};

struct Checker {
  CriterionResult& r;
  void check(bool ok, const std::string& what) {
    r.checks.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    if (!ok) r.pass = false;
  }
};

// Brute-force Z^2 oracle: every lazy word by base-5 counting, the endpoint by
// coordinate sums and the winding number of each unit cell by a ray cast.
struct Z2Oracle {
  std::vector<std::string> loops;
  std::int64_t area_sum = 0;

  static std::int64_t cell_winding_area(const std::string& w) {
    std::vector<std::pair<int, int>> pts{{0, 0}};
    for (char c : w) {
      auto [x, y] = pts.back();
      if (c == 'a') ++x;
      if (c == 'A') --x;
      if (c == 'b') ++y;
      if (c == 'B') --y;
      if (c != '.') pts.push_back({x, y});
    }
    int lo = 0, hi = 0;
    for (auto [x, y] : pts) lo = std::min({lo, x, y}), hi = std::max({hi, x, y});
    std::int64_t total = 0;
    for (int cx = lo; cx < hi; ++cx)
      for (int cy = lo; cy < hi; ++cy) {
        // ray from (cx+1/2, cy+1/2) towards +x crosses vertical edges
        int wind = 0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
          auto [x0, y0] = pts[i];
          auto [x1, y1] = pts[i + 1];
          if (x0 != x1 || x0 <= cx) continue;
          if (std::min(y0, y1) == cy) wind += y1 > y0 ? 1 : -1;
        }
        total += std::abs(wind);
      }
    return total;
  }

  explicit Z2Oracle(int n) {
    static const char kAlpha[] = {'.', 'a', 'A', 'b', 'B'};
    std::int64_t words = 1;
    for (int i = 0; i < n; ++i) words *= 5;
    std::string w(static_cast<std::size_t>(n), '.');
    for (std::int64_t code = 0; code < words; ++code) {
      std::int64_t c = code;
      int x = 0, y = 0;
      for (int i = n - 1; i >= 0; --i) {
        const int u = static_cast<int>(c % 5);
        c /= 5;
        w[static_cast<std::size_t>(i)] = kAlpha[u];
        x += u == 1 ? 1 : u == 2 ? -1 : 0;
        y += u == 3 ? 1 : u == 4 ? -1 : 0;
      }
      if (x == 0 && y == 0) {
        loops.push_back(w);
        area_sum += cell_winding_area(w);
      }
    }
  }
};

struct SampleSet {
  std::vector<LoopSample> loops;
};

SampleSet draw(const GroupSpec& spec, SamplerChoice kind, int n, std::size_t count, std::uint64_t seed,
               std::uint64_t purpose, int workers) {
  LoopSource src(spec, kind, std::max(n, 1));
  SampleSet s;
  s.loops.resize(count);
  parallel_for(count, workers, [&](std::size_t i) { s.loops[i] = src.sample(n, seed, substream(purpose, n, i)); });
  return s;
}

void criterion1(const Ctx& ctx, Checker& c) {
  const GroupSpec z2 = GroupSpec::free_abelian(2);
  const int n_max = ctx.desk() ? 6 : 4;
  const std::size_t samples = ctx.desk() ? 10000 : 2000;
  for (int n = 0; n <= n_max; ++n) {
    const Z2Oracle oracle(n);
    const LoopEnumeration e = enumerate_loops(z2, n);
    std::vector<std::string> enumerated;
    for (const auto& w : e.loops) enumerated.push_back(format_word(w));
    c.check(enumerated == oracle.loops, "n=" + std::to_string(n) + ": enumeration lists the " +
                                            std::to_string(oracle.loops.size()) + " brute-force loops in order");
    const auto [area_sum, count] = exact_mean(e, [](const LazyWord& w) { return winding_area(w); });
    c.check(area_sum == oracle.area_sum,
            "n=" + std::to_string(n) + ": exact winding total " + std::to_string(area_sum) + " = oracle " +
                std::to_string(oracle.area_sum));
    const double exact_avg = count ? static_cast<double>(area_sum) / static_cast<double>(count) : 0.0;
    const double words = std::pow(5.0, n);
    const double p_loop = static_cast<double>(count) / words;

    std::map<std::string, std::size_t> cell;
    for (std::size_t i = 0; i < oracle.loops.size(); ++i) cell[oracle.loops[i]] = i;

    for (SamplerChoice kind : {SamplerChoice::Rejection, SamplerChoice::Bridge}) {
      const char* name = to_string(kind);
      const SampleSet s = draw(z2, kind, n, samples, ctx.seed, 10 + static_cast<int>(kind), ctx.workers);
      std::vector<std::int64_t> hist(oracle.loops.size(), 0);
      std::vector<double> areas;
      double attempts = 0;
      for (const auto& l : s.loops) {
        ++hist[cell.at(format_word(l.word))];
        areas.push_back(static_cast<double>(winding_area(l.word)));
        attempts += static_cast<double>(l.attempts);
      }
      const std::string tag = "n=" + std::to_string(n) + " " + name + ": ";
      if (oracle.loops.size() >= 2) {
        const TestResult chi = chi_square_gof(hist, std::vector<double>(oracle.loops.size(), 1.0));
        c.check(chi.p_value > 0.0027, tag + fmt("uniform over loops, chi-square p = %.4f > 0.0027", chi.p_value));
      }
      const Summary a = summarize(areas);
      const bool area_ok = a.stderr_ == 0 ? a.mean == exact_avg : std::fabs(a.mean - exact_avg) <= 3 * a.stderr_;
      c.check(area_ok, tag + fmt("mean winding area %.4f vs exact %.4f (3 stderr = %.4f)", a.mean, exact_avg,
                                 3 * a.stderr_));
      if (kind == SamplerChoice::Rejection) {
        const double phat = static_cast<double>(samples) / attempts;
        const double se = std::sqrt(p_loop * (1 - p_loop) / attempts);
        const bool ok = se == 0 ? phat == p_loop : std::fabs(phat - p_loop) <= 3 * se;
        c.check(ok, tag + fmt("acceptance rate %.5f vs loops/5^n %.5f (3 stderr = %.5f)", phat, p_loop, 3 * se));
      }
    }
    if (n >= 1) {
      const ReturnTables t = return_tables(z2, n);
      const double p = t.p(n, z2.identity());
      c.check(std::fabs(p - p_loop) <= 1e-12 * p_loop,
              "n=" + std::to_string(n) + fmt(": bridge table p(e) %.12g = loops/5^n %.12g", p, p_loop));
    }
  }
}

void criterion2(const Ctx& ctx, Checker& c) {
  const GroupSpec z2 = GroupSpec::free_abelian(2);
  const int n_max = ctx.desk() ? 8 : 6;
  std::unordered_map<std::string, int> cache;
  std::int64_t loops = 0, mismatches = 0, unresolved = 0;
  for (int n = 0; n <= n_max; ++n) {
    const LoopEnumeration e = enumerate_loops(z2, n);
    for (const auto& w : e.loops) {
      ++loops;
      const Word reduced = free_reduce(w);
      const std::string key = format_word(reduced);
      auto it = cache.find(key);
      if (it == cache.end()) {
        auto a = exact_area_search(z2, reduced, 8);
        it = cache.emplace(key, a ? *a : -1).first;
      }
      if (it->second < 0) ++unresolved;
      else if (it->second != winding_area(w)) ++mismatches;
    }
  }
  c.check(mismatches == 0 && unresolved == 0,
          "winding_area = exact_area_search on " + std::to_string(loops) + " loops of length <= " +
              std::to_string(n_max) + " (" + std::to_string(cache.size()) + " reduced words; " +
              std::to_string(mismatches) + " mismatches, " + std::to_string(unresolved) + " unresolved)");

  const std::size_t per_group = ctx.desk() ? 1000 : 50;
  const int n = ctx.desk() ? 64 : 32;
  for (const char* id : {"z2", "z3", "heis3"}) {
    const GroupSpec spec = GroupSpec::from_id(id);
    const SampleSet s = draw(spec, SamplerChoice::Auto, n, per_group, ctx.seed, 20, ctx.workers);
    std::vector<char> ok(per_group, 0);
    parallel_for(per_group, ctx.workers, [&](std::size_t i) {
      const FillingCertificate cert = dyadic_fill(spec, s.loops[i].word);
      std::ostringstream out;
      write_certificate(out, spec, cert);
      std::istringstream in(out.str());
      FillingCertificate back = read_certificate(in);
      back.target = s.loops[i].word;
      ok[i] = verify_certificate(spec, cert) && verify_certificate(spec, back);
    });
    const auto good = std::count(ok.begin(), ok.end(), 1);
    c.check(good == static_cast<std::ptrdiff_t>(per_group),
            std::string(id) + ": " + std::to_string(good) + "/" + std::to_string(per_group) +
                " dyadic certificates (n=" + std::to_string(n) + ") verify, also after a TSV round trip");
  }
}

void check_slope(Checker& c, const std::string& what, const CurveReport& rep, double target, double tol) {
  if (!rep.fit) {
    c.check(false, what + ": no fit");
    return;
  }
  c.check(std::fabs(rep.fit->slope - target) <= tol,
          what + fmt(": slope %.3f +- %.3f, want %.2f +- %.2f", rep.fit->slope, rep.fit->slope_stderr, target, tol));
}

void criterion3(const Ctx& ctx, Checker& c) {
  const GroupSpec z2 = GroupSpec::free_abelian(2);
  const int n = 512;
  const std::vector<int> ts{16, 32, 64, 128, 256};
  const auto opt = ctx.mc(SamplerChoice::Bridge, ctx.desk() ? 2000 : 200);
  for (int m : {1, 2}) {
    const CurveReport rep = moment_curve(z2, n, ts, m, opt);
    check_slope(c, "m=" + std::to_string(m) + " log E[d(e,w(t))^m] vs log t", rep, m / 2.0, m == 1 ? 0.1 : 0.15);
    Curve tau;
    for (const auto& p : rep.curve.points) tau.add(p.scale * (n - p.scale) / n, p.value, p.stderr_, p.samples);
    const ExponentFit f = exponent_fit(tau);
    c.r.checks.push_back(fmt("info m=%.0f: against tau = t(n-t)/n the slope is %.3f +- %.3f", m, f.slope, f.slope_stderr));
  }
}

void criterion4(const Ctx& ctx, Checker& c) {
  const std::size_t samples = ctx.desk() ? 2000 : 200;
  const auto z = central_moment_curve(GroupSpec::free_abelian(2), {32, 64, 128, 256, 512},
                                      ctx.mc(SamplerChoice::Auto, samples));
  check_slope(c, "z2 E|l| over n=32..512", z, 1.0, 0.15);
  const auto h = central_moment_curve(GroupSpec::heisenberg3(), {32, 64, 128, 256}, ctx.mc(SamplerChoice::Auto, samples));
  check_slope(c, "heis3 E|l| over n=32..256", h, 1.5, 0.25);
}

void criterion5(const Ctx& ctx, Checker& c) {
  const std::size_t samples = ctx.desk() ? 1000 : 20;
  struct Case {
    const char* id;
    std::vector<int> ns;
    double bound;
  };
  for (const Case& k : {Case{"z2", {64, 128, 256, 512, 1024}, 1.25}, Case{"heis3", {32, 64, 128, 256}, 1.75}}) {
    const GroupSpec spec = GroupSpec::from_id(k.id);
    CurveReport rep;
    try {
      rep = avg_area_curve(spec, k.ns, AreaFn::Dyadic, ctx.mc(SamplerChoice::Auto, samples));
    } catch (const std::logic_error& e) {
      c.check(false, std::string(k.id) + ": " + e.what());
      continue;
    }
    c.check(true, std::string(k.id) + ": every dyadic certificate verified (" +
                      std::to_string(samples * k.ns.size()) + " loops)");
    if (!rep.fit) {
      c.check(false, std::string(k.id) + ": no fit");
      continue;
    }
    c.check(rep.fit->slope <= k.bound, std::string(k.id) + fmt(": dyadic area slope %.3f +- %.3f, want <= %.2f",
                                                               rep.fit->slope, rep.fit->slope_stderr, k.bound));
  }
}

void criterion6(const Ctx& ctx, Checker& c) {
  struct Case {
    const char* id;
    std::vector<int> ns;
    double slope, tol;
  };
  const std::vector<Case> cases = ctx.desk()
                                      ? std::vector<Case>{{"z2", {32, 64, 128, 256, 512}, -1.0, 0.1},
                                                          {"heis3", {16, 32, 64, 128}, -2.0, 0.3}}
                                      : std::vector<Case>{{"z2", {16, 32, 64, 128}, -1.0, 0.1}};
  for (const Case& k : cases) {
    const GroupSpec spec = GroupSpec::from_id(k.id);
    const HscReport rep = hsc_check(spec, k.ns);
    c.check(std::fabs(rep.decay.slope - k.slope) <= k.tol,
            std::string(k.id) + fmt(": log p(e) slope %.3f, want %.1f +- %.1f", rep.decay.slope, k.slope, k.tol));
    for (const auto& p : rep.points)
      if (p.n == 128)
        c.check(p.upper_violations == 0,
                std::string(k.id) + fmt(": n=128 upper bound with C=%.3g C'=%.3g, %.0f violations on support %.0f",
                                        p.c_upper, p.cprime_upper, static_cast<double>(p.upper_violations),
                                        static_cast<double>(p.support)));
  }
}

void criterion7(const Ctx& ctx, Checker& c) {
  const GroupSpec z2 = GroupSpec::free_abelian(2);
  const int n = 6;
  int pairs = 0, equal = 0;
  for (int t = 1; t <= n; ++t)
    for (int s = 0; s < t; ++s) {
      ++pairs;
      equal += shift_invariance_test(z2, n, s, t, ShiftMode::Exact).identical;
    }
  c.check(equal == pairs, "n=6 exact: " + std::to_string(equal) + "/" + std::to_string(pairs) +
                              " (s,t) pairs have identical distance distributions");
  if (!ctx.desk()) return;
  const ShiftReport rep = shift_invariance_test(z2, 128, 13, 77, ShiftMode::Sampled, ctx.mc(SamplerChoice::Bridge, 5000));
  c.check(rep.ks.p_value > 0.01,
          fmt("n=128 (s,t)=(13,77) sampled: KS D = %.4f, p = %.4f > 0.01", rep.ks.statistic, rep.ks.p_value));
}

void criterion8(const Ctx&, Checker& c) {
  const GroupSpec z2 = GroupSpec::free_abelian(2);
  const std::vector<std::string> xs{"a", "ab"};
  std::vector<GroupElement> els;
  for (const auto& x : xs) els.push_back(eval_word(z2, parse_word(x)));
  const auto series = ratio_limit_check(z2, els, {64, 128, 256, 512});
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const auto& s = series[k];
    const bool have = !s.ratios.empty() && s.ratios.back().first == 512;
    const double r = have ? s.ratios.back().second : 0.0;
    c.check(have && std::fabs(r - 1) <= 0.1, "x=" + xs[k] + fmt(": p(x)/p(e) at n=512 is %.5f, want 1 +- 0.1", r));
    c.r.checks.push_back("info x=" + xs[k] + ": " + std::to_string(s.monotone_violations) +
                         " monotonicity violations over n=64..512");
  }
}

void criterion9(const Ctx& ctx, Checker& c) {
  const GroupSpec z2 = GroupSpec::free_abelian(2);
  const int n = 64;
  const std::size_t samples = ctx.desk() ? 5000 : 500;
  const auto metric = shared_metric(z2, n);
  std::vector<double> d[2];
  int k = 0;
  for (SamplerChoice kind : {SamplerChoice::Bridge, SamplerChoice::Rejection}) {
    const SampleSet s = draw(z2, kind, n, samples, ctx.seed, 30 + k, ctx.workers);
    for (const auto& l : s.loops) d[k].push_back(metric->norm(l.trace.prefixes[n / 2]));
    ++k;
  }
  const TestResult ks = ks_two_sample(d[0], d[1]);
  c.check(ks.p_value > 0.01, fmt("d(e,w(32)) at n=64, bridge vs rejection: KS D = %.4f, p = %.4f > 0.01",
                                 ks.statistic, ks.p_value));
}

void group_axioms(const Ctx& ctx, Checker& c) {
  for (const char* id : {"z2", "z3", "heis3", "fnil2-3", "filiform4"}) {
    const GroupSpec spec = GroupSpec::from_id(id);
    const int trials = ctx.desk() ? 20000 : 2000;
    std::int64_t bad = 0;
    for (int i = 0; i < trials; ++i) {
      CounterRng rng(ctx.seed, substream(40, 0, static_cast<std::uint64_t>(i)));
      const LazyWord u = sample_lazy_word(spec, 12, rng), v = sample_lazy_word(spec, 12, rng),
                     w = sample_lazy_word(spec, 12, rng);
      const GroupElement x = eval_word(spec, u), y = eval_word(spec, v), z = eval_word(spec, w);
      const GroupElement e = spec.identity();
      LazyWord uv = u;
      uv.insert(uv.end(), v.begin(), v.end());
      bad += spec.multiply(spec.multiply(x, y), z) != spec.multiply(x, spec.multiply(y, z));
      bad += spec.multiply(x, e) != x || spec.multiply(e, x) != x;
      bad += !spec.is_identity(spec.multiply(x, spec.inverse(x)));
      bad += eval_word(spec, uv) != spec.multiply(x, y);
      bad += eval_word(spec, inverse_word(u)) != spec.inverse(x);
      for (const Word& r : spec.relators()) bad += !spec.is_identity(eval_word(spec, r));
    }
    c.check(bad == 0, std::string(id) + ": associativity, identity, inverses, word homomorphism, relators (" +
                          std::to_string(trials) + " triples, " + std::to_string(bad) + " failures)");
  }
}

struct Criterion {
  const char* id;
  const char* title;
  double limit;  // seconds, desk scale
  void (*fn)(const Ctx&, Checker&);
  bool smoke;
};

const Criterion kCriteria[] = {
    {"axioms", "group axioms on the catalog", 60, group_axioms, true},
    {"1", "exact tiny-scale ground truth (z2, n <= 6)", 120, criterion1, true},
    {"2", "oracle equivalence and certificate verification", 600, criterion2, true},
    {"3", "moment slopes m/2 (z2, n=512, bridge)", 900, criterion3, false},
    {"4", "central lower-bound slopes E|l|", 1800, criterion4, false},
    {"5", "dyadic upper-bound slopes", 1800, criterion5, false},
    {"6", "heat-kernel decay and Gaussian upper bound", 1200, criterion6, false},
    {"7", "cyclic-shift invariance", 300, criterion7, true},
    {"8", "ratio limit at n=512", 300, criterion8, false},
    {"9", "bridge vs rejection cross-validation", 300, criterion9, false},
};

}  // namespace

std::vector<CriterionResult> run_suite(const SuiteOptions& opt, const std::function<void(const CriterionResult&)>& report) {
  const Ctx ctx{opt.level, opt.seed, opt.workers > 0 ? opt.workers : default_workers()};
  std::vector<CriterionResult> out;
  for (const Criterion& k : kCriteria) {
    if (!opt.only.empty()) {
      if (std::find(opt.only.begin(), opt.only.end(), k.id) == opt.only.end()) continue;
    } else if (opt.level == SuiteLevel::Smoke && !k.smoke) {
      continue;
    }
    CriterionResult r;
    r.id = k.id;
    r.title = k.title;
    r.pass = true;
    r.time_limit = opt.level == SuiteLevel::Desk ? k.limit : 60;
    Checker c{r};
    const auto start = std::chrono::steady_clock::now();
    try {
      k.fn(ctx, c);
    } catch (const std::exception& e) {
      c.check(false, std::string("aborted: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.seconds > r.time_limit) c.check(false, fmt("runtime %.1f s exceeds %.0f s", r.seconds, r.time_limit));
    if (report) report(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace dehn
