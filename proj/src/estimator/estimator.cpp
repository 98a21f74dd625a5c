#include "dehn/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "dehn/error.hpp"
#include "dehn/metric.hpp"

namespace dehn {

AreaFn parse_area_fn(const std::string& s) {
  if (s == "centralized") return AreaFn::Centralized;
  if (s == "dyadic") return AreaFn::Dyadic;
  if (s == "winding") return AreaFn::Winding;
  if (s == "exact") return AreaFn::Exact;
  throw DomainError("unknown area function '" + s + "'");
}

SamplerChoice parse_sampler(const std::string& s) {
  if (s == "auto") return SamplerChoice::Auto;
  if (s == "rejection") return SamplerChoice::Rejection;
  if (s == "bridge") return SamplerChoice::Bridge;
  if (s == "projected") return SamplerChoice::Projected;
  throw DomainError("unknown sampler '" + s + "'");
}

const char* to_string(AreaFn f) {
  switch (f) {
    case AreaFn::Centralized: return "centralized";
    case AreaFn::Dyadic: return "dyadic";
    case AreaFn::Winding: return "winding";
    case AreaFn::Exact: return "exact";
  }
  return "?";
}

const char* to_string(SamplerChoice s) {
  switch (s) {
    case SamplerChoice::Auto: return "auto";
    case SamplerChoice::Rejection: return "rejection";
    case SamplerChoice::Bridge: return "bridge";
    case SamplerChoice::Projected: return "projected";
  }
  return "?";
}

int default_workers() {
  if (const char* env = std::getenv("DEHNLAB_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(std::min<std::size_t>(count, 1024))));
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = count;
  std::exception_ptr failure;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  if (workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t substream(std::uint64_t purpose, std::uint64_t n, std::uint64_t i) {
  return (purpose << 56) ^ (n << 32) ^ i;
}

LoopSource::LoopSource(const GroupSpec& spec, SamplerChoice choice, int max_n, std::int64_t max_attempts)
    : spec_(spec), kind_(SamplerKind::Rejection), max_n_(max_n), max_attempts_(max_attempts) {
  if (choice == SamplerChoice::Auto)
    choice = spec.kind() == GroupKind::FreeAbelian ? SamplerChoice::Bridge : SamplerChoice::Projected;
  switch (choice) {
    case SamplerChoice::Rejection:
      kind_ = SamplerKind::Rejection;
      break;
    case SamplerChoice::Bridge:
      kind_ = SamplerKind::Bridge;
      tables_ = std::make_shared<const ReturnTables>(return_tables(spec, max_n));
      break;
    default:
      kind_ = SamplerKind::Projected;
      tables_ = std::make_shared<const ReturnTables>(
          return_tables(GroupSpec::free_abelian(spec.generator_count()), max_n));
      break;
  }
}

LoopSample LoopSource::sample(int n, std::uint64_t seed, std::uint64_t stream) const {
  if (n > max_n_) throw DomainError("loop source built for n <= " + std::to_string(max_n_));
  CounterRng rng(seed, stream);
  switch (kind_) {
    case SamplerKind::Bridge: return sample_loop_bridge(spec_, n, rng, *tables_);
    case SamplerKind::Projected: return sample_loop_projected(spec_, n, rng, *tables_, max_attempts_);
    default: return sample_loop_rejection(spec_, n, rng, max_attempts_);
  }
}

double area_of(const GroupSpec& spec, std::span<const Letter> loop, AreaFn fn) {
  switch (fn) {
    case AreaFn::Centralized: return static_cast<double>(centralized_area(spec, loop));
    case AreaFn::Dyadic: {
      const FillingCertificate cert = dyadic_fill(spec, loop);
      if (!verify_certificate(spec, cert)) throw std::logic_error("dyadic certificate failed verification");
      return static_cast<double>(cert.area());
    }
    case AreaFn::Winding: return static_cast<double>(winding_area(loop));
    case AreaFn::Exact: {
      auto a = exact_area_search(spec, loop, 8);
      if (!a) throw BudgetExceeded("exact area search did not resolve " + format_word(loop));
      return *a;
    }
  }
  return 0;
}

namespace {

int max_of(const std::vector<int>& v) { return v.empty() ? 0 : *std::max_element(v.begin(), v.end()); }

// Samples one statistic per loop; failures (sampler or cap) are counted.
struct Collected {
  std::vector<std::vector<double>> values;  // per statistic
  std::int64_t failures = 0;
  std::string first_error;
};

Collected collect(const LoopSource& src, int n, std::size_t stats, const MonteCarloOptions& opt, std::uint64_t purpose,
                  const std::function<void(const LoopSample&, std::vector<double>&)>& measure) {
  std::vector<std::vector<double>> per(opt.samples);
  std::vector<std::string> errors(opt.samples);
  parallel_for(opt.samples, opt.workers, [&](std::size_t i) {
    try {
      const LoopSample s = src.sample(n, opt.seed, substream(purpose, static_cast<std::uint64_t>(n), i));
      std::vector<double> v(stats);
      measure(s, v);
      per[i] = std::move(v);
    } catch (const SamplerFailure& e) {
      errors[i] = e.what();
    } catch (const CapExceeded& e) {
      errors[i] = e.what();
    }
  });
  Collected c;
  c.values.assign(stats, {});
  for (std::size_t i = 0; i < opt.samples; ++i) {
    if (per[i].empty()) {
      ++c.failures;
      if (c.first_error.empty()) c.first_error = errors[i];
      continue;
    }
    for (std::size_t k = 0; k < stats; ++k) c.values[k].push_back(per[i][k]);
  }
  return c;
}

void finish(CurveReport& rep) {
  std::size_t positive = 0;
  for (const auto& p : rep.curve.points) positive += p.value > 0 && p.scale > 0;
  if (positive != rep.curve.points.size() || positive < 3) return;
  try {
    rep.fit = exponent_fit(rep.curve);
  } catch (const DomainError& e) {
    rep.warnings.push_back(std::string("fit skipped: ") + e.what());
  }
}

}  // namespace

CurveReport avg_area_curve(const GroupSpec& spec, const std::vector<int>& n_list, AreaFn area,
                           const MonteCarloOptions& opt) {
  LoopSource src(spec, opt.sampler, max_of(n_list), opt.max_attempts);
  CurveReport rep;
  for (int n : n_list) {
    auto c = collect(src, n, 1, opt, 1, [&](const LoopSample& s, std::vector<double>& v) {
      v[0] = area_of(spec, s.word, area);
    });
    if (c.values[0].empty())
      throw SamplerFailure("no loop sampled at n=" + std::to_string(n) + ": " + c.first_error,
                           static_cast<std::int64_t>(opt.samples));
    const Summary s = summarize(c.values[0]);
    rep.curve.add(n, s.mean, s.stderr_, s.count);
    rep.failures.push_back(c.failures);
    if (c.failures) rep.warnings.push_back("n=" + std::to_string(n) + ": " + std::to_string(c.failures) + " sampler failures");
  }
  finish(rep);
  return rep;
}

CurveReport moment_curve(const GroupSpec& spec, int n, const std::vector<int>& t_list, int m,
                         const MonteCarloOptions& opt) {
  for (int t : t_list)
    if (t < 0 || t >= n) throw DomainError("moment_curve needs 0 <= t < n");
  if (m < 1) throw DomainError("moment order must be >= 1");
  LoopSource src(spec, opt.sampler, n, opt.max_attempts);
  const auto metric = shared_metric(spec, std::max(1, n / 2 + 1));
  auto c = collect(src, n, t_list.size(), opt, 2, [&](const LoopSample& s, std::vector<double>& v) {
    for (std::size_t k = 0; k < t_list.size(); ++k)
      v[k] = std::pow(static_cast<double>(metric->norm(s.trace.prefixes[static_cast<std::size_t>(t_list[k])])), m);
  });
  if (c.values.empty() || (c.values[0].empty() && !t_list.empty()))
    throw SamplerFailure("no loop sampled at n=" + std::to_string(n) + ": " + c.first_error,
                         static_cast<std::int64_t>(opt.samples));
  CurveReport rep;
  for (std::size_t k = 0; k < t_list.size(); ++k) {
    const Summary s = summarize(c.values[k]);
    rep.curve.add(t_list[k], s.mean, s.stderr_, s.count);
    rep.failures.push_back(c.failures);
  }
  if (c.failures) rep.warnings.push_back(std::to_string(c.failures) + " samples failed: " + c.first_error);
  finish(rep);
  return rep;
}

CurveReport central_moment_curve(const GroupSpec& spec, const std::vector<int>& n_list,
                                 const MonteCarloOptions& opt) {
  const CentralExtensionEval ev = central_extension(spec);
  LoopSource src(spec, opt.sampler, max_of(n_list), opt.max_attempts);
  CurveReport rep;
  for (int n : n_list) {
    auto c = collect(src, n, 1, opt, 3, [&](const LoopSample& s, std::vector<double>& v) {
      double l1 = 0;
      for (std::int64_t x : central_coordinates(ev, s.word)) l1 += std::fabs(static_cast<double>(x));
      v[0] = l1;
    });
    if (c.values[0].empty())
      throw SamplerFailure("no loop sampled at n=" + std::to_string(n) + ": " + c.first_error,
                           static_cast<std::int64_t>(opt.samples));
    const Summary s = summarize(c.values[0]);
    rep.curve.add(n, s.mean, s.stderr_, s.count);
    rep.failures.push_back(c.failures);
    if (c.failures) rep.warnings.push_back("n=" + std::to_string(n) + ": " + std::to_string(c.failures) + " sampler failures");
  }
  finish(rep);
  return rep;
}

ShiftReport shift_invariance_test(const GroupSpec& spec, int n, int s, int t, ShiftMode mode,
                                  const MonteCarloOptions& opt) {
  if (!(0 <= s && s < t && t <= n)) throw DomainError("shift test needs 0 <= s < t <= n");
  ShiftReport rep;
  rep.n = n;
  rep.s = s;
  rep.t = t;
  rep.mode = mode;
  const auto metric = shared_metric(spec, std::max(1, n / 2 + 1));
  if (mode == ShiftMode::Exact) {
    const LoopEnumeration e = enumerate_loops(spec, n);
    for (const auto& w : e.loops) {
      const PathTrace tr = trace(spec, w);
      ++rep.shifted[metric->distance(tr.prefixes[static_cast<std::size_t>(s)], tr.prefixes[static_cast<std::size_t>(t)])];
      ++rep.origin[metric->norm(tr.prefixes[static_cast<std::size_t>(t - s)])];
    }
    rep.identical = rep.shifted == rep.origin;
    rep.samples = e.loops.size();
    return rep;
  }
  LoopSource src(spec, opt.sampler, n, opt.max_attempts);
  // independent loop sets for the two statistics
  auto a = collect(src, n, 1, opt, 4, [&](const LoopSample& l, std::vector<double>& v) {
    v[0] = metric->distance(l.trace.prefixes[static_cast<std::size_t>(s)], l.trace.prefixes[static_cast<std::size_t>(t)]);
  });
  auto b = collect(src, n, 1, opt, 5, [&](const LoopSample& l, std::vector<double>& v) {
    v[0] = metric->norm(l.trace.prefixes[static_cast<std::size_t>(t - s)]);
  });
  rep.ks = ks_two_sample(a.values[0], b.values[0]);
  rep.samples = std::min(a.values[0].size(), b.values[0].size());
  return rep;
}

std::vector<RatioSeries> ratio_limit_check(const GroupSpec& spec, const std::vector<GroupElement>& x_list,
                                           const std::vector<int>& n_list, double truncation_ratio) {
  if (!std::is_sorted(n_list.begin(), n_list.end())) throw DomainError("n_list must be ascending");
  std::vector<RatioSeries> out;
  for (const auto& x : x_list) out.push_back({x, {}, {}, 0});
  const StepMeasure m = step_measure(spec);
  ProbabilityTable table = ProbabilityTable::delta(spec, truncation_ratio);
  const GroupElement e = spec.identity();
  for (int n : n_list) {
    while (table.step_count() < n) table = convolve(table, m);
    const double pe = table.at(e);
    for (auto& s : out) {
      const double px = table.at(s.x);
      if (px == 0.0 || pe == 0.0) {
        s.missing.push_back(n);
        continue;
      }
      const double r = px / pe;
      if (!s.ratios.empty() && r < s.ratios.back().second) ++s.monotone_violations;
      s.ratios.emplace_back(n, r);
    }
  }
  return out;
}

LoopEnumeration enumerate_loops(const GroupSpec& spec, int n, std::uint64_t max_words) {
  if (n < 0) throw DomainError("enumerate_loops: negative length");
  const std::uint64_t width = 2 * static_cast<std::uint64_t>(spec.generator_count()) + 1;
  std::uint64_t words = 1;
  for (int i = 0; i < n; ++i) {
    if (__builtin_mul_overflow(words, width, &words) || words > max_words)
      throw BudgetExceeded("enumeration of (2d+1)^" + std::to_string(n) + " words exceeds the budget");
  }
  LoopEnumeration e{spec, n, words, {}, {}};
  const auto metric = shared_metric(spec, std::max(1, n));
  LazyWord w(static_cast<std::size_t>(n));
  std::vector<GroupElement> prefix(static_cast<std::size_t>(n) + 1, spec.identity());
  std::function<void(int)> dfs = [&](int i) {
    if (i == n) {
      if (spec.is_identity(prefix[static_cast<std::size_t>(n)])) e.loops.push_back(w);
      return;
    }
    for (std::uint64_t u = 0; u < width; ++u) {
      const Letter l = letter_from_index(static_cast<int>(u));
      prefix[static_cast<std::size_t>(i) + 1] = spec.apply(prefix[static_cast<std::size_t>(i)], l);
      auto d = metric->try_norm(prefix[static_cast<std::size_t>(i) + 1]);
      if (!d || *d > n - i - 1) continue;
      w[static_cast<std::size_t>(i)] = l;
      dfs(i + 1);
    }
  };
  dfs(0);
  e.distance.assign(static_cast<std::size_t>(n) + 1, {});
  for (const auto& loop : e.loops) {
    const PathTrace tr = trace(spec, loop);
    for (int t = 0; t <= n; ++t) ++e.distance[static_cast<std::size_t>(t)][metric->norm(tr.prefixes[static_cast<std::size_t>(t)])];
  }
  return e;
}

std::pair<std::int64_t, std::uint64_t> exact_mean(const LoopEnumeration& e,
                                                  const std::function<std::int64_t(const LazyWord&)>& stat) {
  std::int64_t num = 0;
  for (const auto& w : e.loops) num += stat(w);
  return {num, e.loop_count()};
}

}  // namespace dehn
