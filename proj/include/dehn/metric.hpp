#pragma once

// Word metric, balls and canonical geodesics for the catalog groups.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "dehn/group.hpp"

namespace dehn {

/// Breadth-first exploration of B(e, R), memoised as a packed-key table.
class BallIndex {
 public:
  /// Throws BudgetExceeded when the ball would hold more than `budget` elements.
  BallIndex(const GroupSpec& spec, int radius, std::size_t budget = 20'000'000);
  ~BallIndex();
  BallIndex(BallIndex&&) noexcept;
  BallIndex& operator=(BallIndex&&) noexcept;

  int radius() const { return radius_; }
  /// d(e, g) when g lies in the explored ball.
  std::optional<int> distance(const GroupElement& g) const;
  /// #S(e, r) for r = 0..radius.
  const std::vector<std::int64_t>& sphere_sizes() const { return spheres_; }
  std::size_t size() const;

 private:
  struct Table;
  GroupSpec spec_;
  int radius_;
  std::vector<std::int64_t> spheres_;
  std::unique_ptr<Table> table_;
};

/// Exact word length in Heisenberg3 from the extremal z reachable by paths of
/// each length: the set of z values reached by length-L words ending over
/// (x, y) is the integer interval [zmin, zmax], and zmax obeys a max-plus
/// recurrence over the lattice. zmin(L, x, y) = -zmax(L, x, -y).
class HeisenbergProfile {
 public:
  explicit HeisenbergProfile(int radius);
  int radius() const { return radius_; }
  std::optional<int> distance(std::int64_t x, std::int64_t y, std::int64_t z) const;
  /// Largest z over words of length exactly L ending at (x, y); nullopt if none.
  std::optional<std::int64_t> zmax(int length, std::int64_t x, std::int64_t y) const;

 private:
  const std::vector<std::int32_t>* column(std::int64_t x, std::int64_t y) const;

  int radius_;
  // column(x, y)[k] = zmax at length |x|+|y|+2k
  std::vector<std::vector<std::int32_t>> columns_;
};

/// d(x, y) = |x^-1 y| for a fixed group, valid up to a radius cap.
/// Construction does all the exploration; queries are read-only.
class WordMetric {
 public:
  WordMetric(const GroupSpec& spec, int radius_cap);

  const GroupSpec& spec() const { return spec_; }
  int radius_cap() const { return cap_; }

  std::optional<int> try_norm(const GroupElement& g) const;
  /// Throws CapExceeded when |g| > radius_cap.
  int norm(const GroupElement& g) const;
  int distance(const GroupElement& x, const GroupElement& y) const;

  /// Canonical shortest word from x to y. geodesic(y, x) is always the
  /// reversed inverse of geodesic(x, y).
  Word geodesic(const GroupElement& x, const GroupElement& y) const;
  /// Lexicographically least shortest word spelling g under a < A < b < B < ...
  Word lexmin_word(const GroupElement& g) const;

 private:
  GroupSpec spec_;
  int cap_;
  std::shared_ptr<const BallIndex> ball_;
  std::shared_ptr<const HeisenbergProfile> heis_;
};

/// Process-wide cache: returns a metric with cap >= radius_cap.
std::shared_ptr<const WordMetric> shared_metric(const GroupSpec& spec, int radius_cap);

int word_metric(const GroupSpec& spec, const GroupElement& x, const GroupElement& y,
                int radius_cap);
Word geodesic(const GroupSpec& spec, const GroupElement& x, const GroupElement& y,
              int radius_cap = 64);

/// #S(e, r) for r = 0..R.
std::vector<std::int64_t> ball_census(const GroupSpec& spec, int radius,
                                      std::size_t budget = 20'000'000);

int growth_degree(const GroupSpec& spec);

}  // namespace dehn
