#pragma once

// Monte Carlo and exact-enumeration statistics over random loops.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dehn/filling.hpp"
#include "dehn/group.hpp"
#include "dehn/stats.hpp"
#include "dehn/walk.hpp"

namespace dehn {

enum class AreaFn { Centralized, Dyadic, Winding, Exact };
enum class SamplerChoice { Auto, Rejection, Bridge, Projected };

AreaFn parse_area_fn(const std::string& s);
SamplerChoice parse_sampler(const std::string& s);
const char* to_string(AreaFn f);
const char* to_string(SamplerChoice s);

/// DEHNLAB_WORKERS if set, else the hardware thread count.
int default_workers();

/// Runs fn(0..count-1) over `workers` threads. Results must be written by
/// index so the outcome does not depend on scheduling. The first exception
/// (lowest index) is rethrown after all workers stop.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

/// Substream id for sample i of scale n under a purpose tag.
std::uint64_t substream(std::uint64_t purpose, std::uint64_t n, std::uint64_t i);

/// Sampler with its tables, built once and shared read-only by workers.
class LoopSource {
 public:
  /// Auto picks Bridge for FreeAbelian and Projected otherwise.
  LoopSource(const GroupSpec& spec, SamplerChoice choice, int max_n, std::int64_t max_attempts = 10'000'000);

  const GroupSpec& spec() const { return spec_; }
  SamplerKind kind() const { return kind_; }
  LoopSample sample(int n, std::uint64_t seed, std::uint64_t stream) const;

 private:
  GroupSpec spec_;
  SamplerKind kind_;
  int max_n_;
  std::int64_t max_attempts_;
  std::shared_ptr<const ReturnTables> tables_;
};

/// Area of a loop under the chosen proxy. Exact throws BudgetExceeded when
/// the search does not resolve.
double area_of(const GroupSpec& spec, std::span<const Letter> loop, AreaFn fn);

struct CurveReport {
  Curve curve;
  std::vector<std::int64_t> failures;  // per point
  std::vector<std::string> warnings;
  std::optional<ExponentFit> fit;
};

struct MonteCarloOptions {
  SamplerChoice sampler = SamplerChoice::Auto;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  int workers = 1;
  std::int64_t max_attempts = 10'000'000;
};

/// Mean area per n with stderr. A point with zero successful samples throws.
CurveReport avg_area_curve(const GroupSpec& spec, const std::vector<int>& n_list, AreaFn area,
                           const MonteCarloOptions& opt);

/// E[d(e, w(t))^m] over loops of length n, one point per t.
CurveReport moment_curve(const GroupSpec& spec, int n, const std::vector<int>& t_list, int m,
                         const MonteCarloOptions& opt);

/// E|l| (L1 over central coordinates) per n.
CurveReport central_moment_curve(const GroupSpec& spec, const std::vector<int>& n_list,
                                 const MonteCarloOptions& opt);

enum class ShiftMode { Exact, Sampled };

struct ShiftReport {
  int n = 0, s = 0, t = 0;
  ShiftMode mode = ShiftMode::Exact;
  /// Exact mode: loop counts by distance.
  std::map<int, std::uint64_t> shifted;  // d(w(s), w(t))
  std::map<int, std::uint64_t> origin;   // d(e, w(t-s))
  bool identical = false;
  /// Sampled mode.
  TestResult ks;
  std::size_t samples = 0;
};

ShiftReport shift_invariance_test(const GroupSpec& spec, int n, int s, int t, ShiftMode mode,
                                  const MonteCarloOptions& opt = {});

struct RatioSeries {
  GroupElement x;
  std::vector<std::pair<int, double>> ratios;  // (n, p^(n)(x) / p^(n)(e))
  std::vector<int> missing;                    // n with x outside the support
  std::int64_t monotone_violations = 0;
};

std::vector<RatioSeries> ratio_limit_check(const GroupSpec& spec, const std::vector<GroupElement>& x_list,
                                           const std::vector<int>& n_list, double truncation_ratio = 1e-15);

struct LoopEnumeration {
  GroupSpec spec;
  int n = 0;
  std::uint64_t word_count = 0;  // (2d+1)^n
  std::vector<LazyWord> loops;   // lexicographic in letter index order
  /// distance[t][r] = number of loops with d(e, w(t)) = r.
  std::vector<std::map<int, std::uint64_t>> distance;

  std::uint64_t loop_count() const { return loops.size(); }
};

/// Depth-first enumeration with distance pruning. Throws BudgetExceeded
/// when (2d+1)^n exceeds max_words.
LoopEnumeration enumerate_loops(const GroupSpec& spec, int n, std::uint64_t max_words = 50'000'000);

/// Exact mean of an integer statistic over the enumerated loops as a
/// (numerator, denominator) pair.
std::pair<std::int64_t, std::uint64_t> exact_mean(const LoopEnumeration& e,
                                                  const std::function<std::int64_t(const LazyWord&)>& stat);

}  // namespace dehn
