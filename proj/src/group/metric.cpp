#include "dehn/metric.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>

#include "dehn/simd/kernels.hpp"

namespace dehn {
namespace {

using Key = unsigned __int128;

int coordinate_weight(const GroupSpec& spec, int i) {
  switch (spec.kind()) {
    case GroupKind::FreeAbelian: return 1;
    case GroupKind::Heisenberg3: return i == 2 ? 2 : 1;
    case GroupKind::FreeNilpotentClass2: return i < spec.generator_count() ? 1 : 2;
    case GroupKind::Filiform4: return i == 0 ? 3 : (i == 1 ? 2 : 1);
  }
  return 1;
}

// Packs coordinates bounded by R^weight into 128 bits.
class Packer {
 public:
  Packer(const GroupSpec& spec, int radius) : arity_(spec.arity()) {
    int total = 0;
    for (int i = 0; i < arity_; ++i) {
      std::int64_t bound = 1;
      for (int w = 0; w < coordinate_weight(spec, i); ++w) bound *= std::max(radius, 1);
      bounds_[i] = bound;
      shifts_[i] = total;
      total += std::bit_width(static_cast<std::uint64_t>(2 * bound + 1));
    }
    if (total > 128) throw BudgetExceeded("ball radius too large to index " + spec.id());
  }

  std::optional<Key> pack(const GroupElement& g) const {
    Key k = 0;
    for (int i = 0; i < arity_; ++i) {
      const std::int64_t c = g.coords[i];
      if (c > bounds_[i] || c < -bounds_[i]) return std::nullopt;
      k |= static_cast<Key>(static_cast<std::uint64_t>(c + bounds_[i])) << shifts_[i];
    }
    return k;
  }

 private:
  int arity_;
  std::array<std::int64_t, kMaxArity> bounds_{};
  std::array<int, kMaxArity> shifts_{};
};

std::uint64_t mix(Key k) {
  std::uint64_t h = static_cast<std::uint64_t>(k) ^ (static_cast<std::uint64_t>(k >> 64) * 0x9e3779b97f4a7c15ULL);
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  return h ^ (h >> 33);
}

}  // namespace

// Open addressing, linear probing; distance 0xFF marks an empty slot.
struct BallIndex::Table {
  Packer packer;
  std::vector<Key> keys;
  std::vector<std::uint8_t> dist;
  std::size_t count = 0;

  Table(const GroupSpec& spec, int radius) : packer(spec, radius) { rehash(1024); }

  void rehash(std::size_t cap) {
    std::vector<Key> old_keys = std::move(keys);
    std::vector<std::uint8_t> old_dist = std::move(dist);
    keys.assign(cap, 0);
    dist.assign(cap, 0xFF);
    count = 0;
    for (std::size_t i = 0; i < old_keys.size(); ++i)
      if (old_dist[i] != 0xFF) insert(old_keys[i], old_dist[i]);
  }

  // Returns false when the key was already present.
  bool insert(Key k, std::uint8_t d) {
    if (2 * (count + 1) > keys.size()) rehash(keys.size() * 2);
    const std::size_t mask = keys.size() - 1;
    for (std::size_t i = mix(k) & mask;; i = (i + 1) & mask) {
      if (dist[i] == 0xFF) {
        keys[i] = k;
        dist[i] = d;
        ++count;
        return true;
      }
      if (keys[i] == k) return false;
    }
  }

  std::optional<int> find(Key k) const {
    const std::size_t mask = keys.size() - 1;
    for (std::size_t i = mix(k) & mask;; i = (i + 1) & mask) {
      if (dist[i] == 0xFF) return std::nullopt;
      if (keys[i] == k) return dist[i];
    }
  }
};

BallIndex::BallIndex(const GroupSpec& spec, int radius, std::size_t budget)
    : spec_(spec), radius_(radius) {
  if (radius < 0 || radius > 250) throw DomainError("ball radius must be in [0, 250]");
  table_ = std::make_unique<Table>(spec, radius);
  std::vector<GroupElement> frontier{spec.identity()};
  table_->insert(*table_->packer.pack(spec.identity()), 0);
  spheres_.push_back(1);
  std::vector<Letter> letters;
  for (int i = 0; i < spec.generator_count(); ++i) {
    letters.push_back(Letter::gen(i));
    letters.push_back(Letter::gen(i, true));
  }
  for (int r = 1; r <= radius; ++r) {
    std::vector<GroupElement> next;
    for (const GroupElement& g : frontier) {
      for (Letter l : letters) {
        GroupElement h = spec.apply(g, l);
        auto key = table_->packer.pack(h);
        if (!key) throw BudgetExceeded("ball element outside packing bounds");
        if (table_->insert(*key, static_cast<std::uint8_t>(r))) next.push_back(h);
      }
      if (table_->count > budget)
        throw BudgetExceeded("ball of radius " + std::to_string(radius) + " in " + spec.id() +
                             " exceeds budget of " + std::to_string(budget) + " elements");
    }
    spheres_.push_back(static_cast<std::int64_t>(next.size()));
    frontier = std::move(next);
  }
}

BallIndex::~BallIndex() = default;
BallIndex::BallIndex(BallIndex&&) noexcept = default;
BallIndex& BallIndex::operator=(BallIndex&&) noexcept = default;

std::size_t BallIndex::size() const { return table_->count; }

std::optional<int> BallIndex::distance(const GroupElement& g) const {
  auto key = table_->packer.pack(g);
  if (!key) return std::nullopt;
  return table_->find(*key);
}

HeisenbergProfile::HeisenbergProfile(int radius) : radius_(radius) {
  if (radius < 0 || radius > 2048) throw DomainError("Heisenberg profile radius out of range");
  const int R = radius;
  const int width = 2 * R + 3;  // one padding cell on each side
  const auto index = [&](int x, int y) {
    return static_cast<std::size_t>(x + R + 1) * width + static_cast<std::size_t>(y + R + 1);
  };
  std::vector<std::int32_t> cur(static_cast<std::size_t>(width) * width, simd::kNegInf);
  std::vector<std::int32_t> next = cur;
  cur[index(0, 0)] = 0;
  columns_.assign(static_cast<std::size_t>(2 * R + 1) * (2 * R + 1), {});
  columns_[static_cast<std::size_t>(R) * (2 * R + 1) + R].push_back(0);

  const auto& k = simd::active_kernels();
  for (int L = 1; L <= R; ++L) {
    // Letters a/A move x and leave z; b/B at column x shift z by +-x.
    for (int x = -std::min(L, R); x <= std::min(L, R); ++x) {
      const std::size_t row = index(x, -R);
      k.maxplus_row(next.data() + row, cur.data() + index(x - 1, -R), cur.data() + index(x + 1, -R),
                    cur.data() + row - 1, cur.data() + row + 1, static_cast<std::size_t>(2 * R + 1),
                    static_cast<std::int32_t>(x), static_cast<std::int32_t>(-x));
    }
    std::swap(cur, next);
    for (int x = -L; x <= L; ++x) {
      const int rest = L - std::abs(x);
      for (int y = -rest; y <= rest; y += 1) {
        if (((std::abs(x) + std::abs(y)) & 1) != (L & 1)) continue;
        const std::int32_t v = cur[index(x, y)];
        columns_[static_cast<std::size_t>(x + R) * (2 * R + 1) + (y + R)].push_back(v);
      }
    }
  }
}

const std::vector<std::int32_t>* HeisenbergProfile::column(std::int64_t x, std::int64_t y) const {
  if (std::abs(x) + std::abs(y) > radius_) return nullptr;
  const std::size_t side = 2 * static_cast<std::size_t>(radius_) + 1;
  return &columns_[static_cast<std::size_t>(x + radius_) * side + static_cast<std::size_t>(y + radius_)];
}

std::optional<std::int64_t> HeisenbergProfile::zmax(int length, std::int64_t x, std::int64_t y) const {
  const auto* col = column(x, y);
  const std::int64_t s = std::abs(x) + std::abs(y);
  if (!col || length < s || length > radius_ || ((length - s) & 1)) return std::nullopt;
  return (*col)[static_cast<std::size_t>((length - s) / 2)];
}

std::optional<int> HeisenbergProfile::distance(std::int64_t x, std::int64_t y, std::int64_t z) const {
  const auto* up = column(x, y);
  const auto* down = column(x, -y);
  if (!up) return std::nullopt;
  const std::int64_t s = std::abs(x) + std::abs(y);
  // zmax is nondecreasing and zmin nonincreasing along the column
  auto it = std::partition_point(up->begin(), up->end(), [&](std::int32_t zmax) { return zmax < z; });
  std::size_t k = static_cast<std::size_t>(it - up->begin());
  auto it2 = std::partition_point(down->begin(), down->end(),
                                  [&](std::int32_t zmax_mirror) { return -zmax_mirror > z; });
  k = std::max(k, static_cast<std::size_t>(it2 - down->begin()));
  if (k >= up->size()) return std::nullopt;
  return static_cast<int>(s + 2 * static_cast<std::int64_t>(k));
}

WordMetric::WordMetric(const GroupSpec& spec, int radius_cap) : spec_(spec), cap_(radius_cap) {
  if (radius_cap < 0) throw DomainError("radius cap must be non-negative");
  switch (spec.kind()) {
    case GroupKind::FreeAbelian: break;
    case GroupKind::Heisenberg3: heis_ = std::make_shared<HeisenbergProfile>(radius_cap); break;
    default: ball_ = std::make_shared<BallIndex>(spec, radius_cap); break;
  }
}

std::optional<int> WordMetric::try_norm(const GroupElement& g) const {
  switch (spec_.kind()) {
    case GroupKind::FreeAbelian: {
      std::int64_t s = 0;
      for (int i = 0; i < g.arity; ++i) s += std::abs(g.coords[i]);
      if (s > cap_) return std::nullopt;
      return static_cast<int>(s);
    }
    case GroupKind::Heisenberg3: return heis_->distance(g.coords[0], g.coords[1], g.coords[2]);
    default: return ball_->distance(g);
  }
}

int WordMetric::norm(const GroupElement& g) const {
  if (auto d = try_norm(g)) return *d;
  throw CapExceeded("word length of " + to_string(g) + " in " + spec_.id() + " exceeds radius cap",
                    cap_);
}

int WordMetric::distance(const GroupElement& x, const GroupElement& y) const {
  return norm(spec_.multiply(spec_.inverse(x), y));
}

Word WordMetric::lexmin_word(const GroupElement& target) const {
  int d = norm(target);
  GroupElement g = target;
  Word w;
  w.reserve(static_cast<std::size_t>(d));
  std::vector<Letter> order;
  for (int i = 0; i < spec_.generator_count(); ++i) {
    order.push_back(Letter::gen(i));
    order.push_back(Letter::gen(i, true));
  }
  while (d > 0) {
    bool advanced = false;
    for (Letter l : order) {
      GroupElement h = spec_.multiply(spec_.letter_element(l.inverse()), g);
      auto dh = try_norm(h);
      if (dh && *dh == d - 1) {
        w.push_back(l);
        g = h;
        --d;
        advanced = true;
        break;
      }
    }
    if (!advanced) throw Error("geodesic extraction failed: metric is not a word metric");
  }
  return w;
}

Word WordMetric::geodesic(const GroupElement& x, const GroupElement& y) const {
  const GroupElement g = spec_.multiply(spec_.inverse(x), y);
  const GroupElement gi = spec_.inverse(g);
  if (g >= gi) return lexmin_word(g);
  return inverse_word(lexmin_word(gi));
}

std::shared_ptr<const WordMetric> shared_metric(const GroupSpec& spec, int radius_cap) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const WordMetric>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[spec.id()];
  if (!slot || slot->radius_cap() < radius_cap) {
    int cap = radius_cap;
    if (slot) {
      const int old = slot->radius_cap();
      const int grown = spec.kind() == GroupKind::FreeAbelian ? 2 * old : old + old / 4;
      cap = std::max(radius_cap, grown);
    }
    slot = std::make_shared<const WordMetric>(spec, cap);
  }
  return slot;
}

int word_metric(const GroupSpec& spec, const GroupElement& x, const GroupElement& y, int radius_cap) {
  const int d = shared_metric(spec, radius_cap)->distance(x, y);
  if (d > radius_cap)
    throw CapExceeded("distance in " + spec.id() + " exceeds radius cap", radius_cap);
  return d;
}

Word geodesic(const GroupSpec& spec, const GroupElement& x, const GroupElement& y, int radius_cap) {
  const auto metric = shared_metric(spec, radius_cap);
  if (metric->distance(x, y) > radius_cap)
    throw CapExceeded("geodesic in " + spec.id() + " exceeds radius cap", radius_cap);
  return metric->geodesic(x, y);
}

std::vector<std::int64_t> ball_census(const GroupSpec& spec, int radius, std::size_t budget) {
  return BallIndex(spec, radius, budget).sphere_sizes();
}

int growth_degree(const GroupSpec& spec) { return spec.growth_degree(); }

}  // namespace dehn
