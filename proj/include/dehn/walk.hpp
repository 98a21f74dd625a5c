#pragma once

// Step measures, heat-kernel convolution tables and loop samplers.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "dehn/group.hpp"
#include "dehn/rng.hpp"
#include "dehn/stats.hpp"

namespace dehn {

/// Finitely supported symmetric measure, one entry per letter.
struct StepMeasure {
  GroupSpec spec;
  std::vector<Letter> letters;
  std::vector<GroupElement> elements;
  std::vector<double> probabilities;

  std::size_t size() const { return letters.size(); }
};

/// Uniform over {e, e_i, e_i^-1}: letters in the order ., a, A, b, B, ...
StepMeasure step_measure(const GroupSpec& spec);

/// p^(t) as a row store: rows are keyed by the non-central coordinates and
/// hold a dense run over the central axis. Right multiplication by a letter
/// shifts a whole row by an amount that depends only on the key.
class ProbabilityTable {
 public:
  static ProbabilityTable delta(const GroupSpec& spec, double truncation_ratio = 1e-15);

  const GroupSpec& spec() const { return spec_; }
  int step_count() const { return steps_; }
  /// Entries below truncation_ratio * (max entry) are dropped after each step.
  double truncation_ratio() const { return ratio_; }
  double lost_mass() const { return lost_; }
  double total_mass() const;
  double max_entry() const;
  std::size_t support_size() const;
  std::size_t stored_values() const;

  double at(const GroupElement& g) const;

  /// Visits non-zero entries in lexicographic key order, central axis innermost.
  void for_each(const std::function<void(const GroupElement&, double)>& fn) const;

  friend ProbabilityTable convolve(const ProbabilityTable& table, const StepMeasure& m);

 private:
  struct Row {
    GroupElement key;  // central coordinate zero
    std::int64_t lo = 0;
    std::vector<double> values;
  };

  ProbabilityTable(const GroupSpec& spec, double ratio) : spec_(spec), ratio_(ratio) {}
  void rebuild_index();
  const Row* find_row(const GroupElement& key) const;

  GroupSpec spec_;
  int steps_ = 0;
  double ratio_;
  double lost_ = 0;
  std::vector<Row> rows_;
  std::unordered_map<GroupElement, std::uint32_t, GroupElementHash> index_;
};

/// new(x) = sum_g old(x g^-1) m(g), then truncation. Lost mass only grows.
ProbabilityTable convolve(const ProbabilityTable& table, const StepMeasure& m);

/// Exact path counts: p^(t)(g) = count(g) / (2d+1)^t.
class ExactTable {
 public:
  explicit ExactTable(const GroupSpec& spec);

  const GroupSpec& spec() const { return spec_; }
  int step_count() const { return steps_; }
  std::uint64_t denominator() const { return denom_; }
  std::uint64_t count(const GroupElement& g) const;
  const std::map<GroupElement, std::uint64_t>& counts() const { return counts_; }
  double probability(const GroupElement& g) const;

  /// Throws OverflowError once (2d+1)^t no longer fits in 64 bits.
  void step();

 private:
  GroupSpec spec_;
  int steps_ = 0;
  std::uint64_t denom_ = 1;
  std::map<GroupElement, std::uint64_t> counts_;
};

/// p^(t) for t = 0..n, as consumed by the bridge sampler.
struct ReturnTables {
  GroupSpec spec;
  std::vector<ProbabilityTable> tables;

  int horizon() const { return static_cast<int>(tables.size()) - 1; }
  double p(int t, const GroupElement& g) const { return tables.at(t).at(g); }
};

/// Throws BudgetExceeded when the stored values would exceed `max_bytes`.
ReturnTables return_tables(const GroupSpec& spec, int n, std::size_t max_bytes = 2'000'000'000,
                           double truncation_ratio = 1e-15);

/// CSV with header c0,...,c{k-1},probability.
void write_csv(std::ostream& out, const ProbabilityTable& table);

enum class SamplerKind { Rejection, Bridge, Projected, Enumeration };

const char* to_string(SamplerKind kind);

struct LoopSample {
  LazyWord word;
  PathTrace trace;
  SamplerKind method = SamplerKind::Rejection;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::int64_t attempts = 1;
};

/// Letter index u in [0, 2d] maps to ., a, A, b, B, ...
Letter letter_from_index(int u);
int letter_index(Letter l);

LazyWord sample_lazy_word(const GroupSpec& spec, int n, CounterRng& rng);

/// Exact draw from the uniform measure on length-n lazy loops.
/// Throws SamplerFailure after max_attempts.
LoopSample sample_loop_rejection(const GroupSpec& spec, int n, CounterRng& rng,
                                 std::int64_t max_attempts = 10'000'000);

/// Time-inhomogeneous walk: at step t from x, letter g has weight
/// p(g) p^(n-t-1)((x g)^-1). Requires tables.horizon() >= n - 1.
LoopSample sample_loop_bridge(const GroupSpec& spec, int n, CounterRng& rng,
                              const ReturnTables& tables);

/// Bridge on the abelianisation Z^d followed by rejection in `spec`.
/// Exact for any catalog group: conditioning the uniform Z^d loop measure on
/// triviality in `spec` gives the uniform loop measure of `spec`.
LoopSample sample_loop_projected(const GroupSpec& spec, int n, CounterRng& rng,
                                 const ReturnTables& abelian_tables,
                                 std::int64_t max_attempts = 10'000'000);

/// p^(t) transition kernel for walks conditioned to be at e at time n.
/// Throws DomainError when t >= n or the normaliser vanishes.
double hat_p(const GroupSpec& spec, const GroupElement& x, const GroupElement& y, int t, int n,
             const ReturnTables& tables);

struct HeatPoint {
  int n = 0;
  double p_identity = 0;
  double lost_mass = 0;
  std::size_t support = 0;
};

/// p^(n)(e) for each n in n_list (sorted ascending) from one convolution run.
std::vector<HeatPoint> heat_kernel_at_identity(const GroupSpec& spec, const std::vector<int>& n_list,
                                               double truncation_ratio = 1e-15);

struct HscPoint {
  int n = 0;
  double p_identity = 0;
  std::size_t support = 0;
  double lost_mass = 0;
  /// Smallest C, C' fitted on this n alone.
  double c_upper = 0;
  double cprime_upper = 0;
  std::int64_t upper_violations = 0;
  /// Lower bound checked on B(e, n / C'').
  std::size_t lower_region = 0;
  double c_lower = 0;
  double cprime_lower = 0;
  std::int64_t lower_violations = 0;
};

struct HscReport {
  GroupSpec spec;
  int growth_degree = 0;
  double c_double_prime = 8;
  /// Single pair fitted over every n in the list.
  double c_upper = 0;
  double cprime_upper = 0;
  std::int64_t upper_violations = 0;
  double c_lower = 0;
  double cprime_lower = 0;
  std::int64_t lower_violations = 0;
  std::vector<HscPoint> points;
  /// log p^(n)(e) against log n.
  ExponentFit decay;
};

/// Fits the Gaussian upper and lower heat-kernel bounds. The upper pair
/// minimises C * C' over a geometric grid of C'; the lower bound is checked on
/// B(e, n / C''). Violations are reported, never thrown.
HscReport hsc_check(const GroupSpec& spec, const std::vector<int>& n_list,
                    double c_double_prime = 8, double truncation_ratio = 1e-15);

}  // namespace dehn
