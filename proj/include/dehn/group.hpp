#pragma once

// Exact arithmetic for the catalog of nilpotent groups, in integer normal-form
// coordinates. Every product is checked for 64-bit overflow.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dehn/error.hpp"

namespace dehn {

inline constexpr int kMaxArity = 10;

/// One letter of a lazy word: a generator, its inverse, or the lazy step.
class Letter {
 public:
  constexpr Letter() = default;

  static constexpr Letter lazy() { return Letter{}; }
  /// `index` is 0-based; a=0, b=1, ...
  static constexpr Letter gen(int index, bool inverse = false) {
    Letter l;
    l.raw_ = static_cast<std::int8_t>(inverse ? -(index + 1) : (index + 1));
    return l;
  }
  static constexpr Letter from_raw(int raw) {
    Letter l;
    l.raw_ = static_cast<std::int8_t>(raw);
    return l;
  }

  constexpr bool is_lazy() const { return raw_ == 0; }
  constexpr int generator() const { return (raw_ > 0 ? raw_ : -raw_) - 1; }
  constexpr bool inverted() const { return raw_ < 0; }
  constexpr int exponent() const { return raw_ > 0 ? 1 : (raw_ < 0 ? -1 : 0); }
  constexpr Letter inverse() const { return from_raw(-raw_); }
  constexpr int raw() const { return raw_; }

  /// Position in the fixed tie-break order a < A < b < B < ... ; lazy sorts last.
  constexpr int rank() const {
    return is_lazy() ? 1 << 12 : 2 * generator() + (inverted() ? 1 : 0);
  }

  char to_char() const;

  friend constexpr bool operator==(Letter, Letter) = default;

 private:
  std::int8_t raw_ = 0;
};

using Word = std::vector<Letter>;
/// Words over generators, inverses and the lazy letter; the sample space of the walk.
using LazyWord = Word;

/// Parses letters a..z (generator), A..Z (inverse) and '.' (lazy).
Word parse_word(std::string_view text);
std::string format_word(std::span<const Letter> word);
Word inverse_word(std::span<const Letter> word);
/// Lazy letters are dropped and adjacent inverse pairs cancelled.
Word free_reduce(std::span<const Letter> word);
/// Appends `word` to an already reduced `acc`, cancelling at the seam.
void append_reduced(Word& acc, std::span<const Letter> word);

struct GroupElement {
  std::array<std::int64_t, kMaxArity> coords{};
  std::uint8_t arity = 0;

  std::span<const std::int64_t> view() const { return {coords.data(), arity}; }
  std::int64_t operator[](std::size_t i) const { return coords[i]; }
  std::int64_t& operator[](std::size_t i) { return coords[i]; }

  friend bool operator==(const GroupElement& a, const GroupElement& b) {
    if (a.arity != b.arity) return false;
    for (int i = 0; i < a.arity; ++i)
      if (a.coords[i] != b.coords[i]) return false;
    return true;
  }
  friend std::strong_ordering operator<=>(const GroupElement& a, const GroupElement& b) {
    for (int i = 0; i < a.arity && i < b.arity; ++i)
      if (auto c = a.coords[i] <=> b.coords[i]; c != 0) return c;
    return a.arity <=> b.arity;
  }
};

std::string to_string(const GroupElement& g);

struct GroupElementHash {
  std::size_t operator()(const GroupElement& g) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ g.arity;
    for (int i = 0; i < g.arity; ++i) {
      h ^= static_cast<std::uint64_t>(g.coords[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 0xbf58476d1ce4e5b9ULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 31));
  }
};

enum class GroupKind { FreeAbelian, Heisenberg3, FreeNilpotentClass2, Filiform4 };

/// A catalog group: presentation plus normal-form multiplication.
///
/// Coordinate charts:
///   FreeAbelian(d)          v in Z^d
///   Heisenberg3             (x, y, z), (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x y')
///   FreeNilpotentClass2(k)  (v, M_12, M_13, ..., M_{k-1,k}), M += M' + upper(v (x) v')
///   Filiform4               (v1, v2, v3, m), (v;m)(v';m') = (v + J^m v'; m+m')
/// where J is the 3x3 unipotent Jordan block. Filiform4 generators are
/// t = (0;1) and s = (e3;0); then [t,s] = (e2;0) and [t,[t,s]] = (e1;0).
class GroupSpec {
 public:
  static GroupSpec free_abelian(int d);
  static GroupSpec heisenberg3();
  static GroupSpec free_nilpotent2(int k);
  static GroupSpec filiform4();
  /// Catalog ids: "z<d>" (1 <= d <= 4), "heis3", "fnil2-<k>" (2 <= k <= 4), "filiform4". Throws DomainError.
  static GroupSpec from_id(std::string_view id);

  GroupKind kind() const { return kind_; }
  const std::string& id() const { return id_; }
  int generator_count() const { return gens_; }
  int arity() const { return arity_; }
  const std::vector<Word>& relators() const { return relators_; }
  /// Index of a central coordinate: the line axis used by convolution tables.
  int central_axis() const { return central_axis_; }
  /// Polynomial volume growth degree D of the catalog group.
  int growth_degree() const;

  GroupElement identity() const;
  GroupElement element(std::span<const std::int64_t> coords) const;
  GroupElement letter_element(Letter l) const;
  GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
  GroupElement inverse(const GroupElement& g) const;
  /// g * l, specialised per group.
  GroupElement apply(const GroupElement& g, Letter l) const;
  void apply_in_place(GroupElement& g, Letter l) const;
  bool valid(Letter l) const { return l.is_lazy() || l.generator() < gens_; }
  void check(Letter l) const;
  bool is_identity(const GroupElement& g) const;

  friend bool operator==(const GroupSpec& a, const GroupSpec& b) { return a.id_ == b.id_; }

 private:
  GroupSpec(GroupKind kind, int param);

  GroupKind kind_;
  int param_;
  int gens_;
  int arity_;
  int central_axis_;
  std::string id_;
  std::vector<Word> relators_;
};

GroupElement eval_word(const GroupSpec& spec, std::span<const Letter> word);

/// prefixes[i] = w(i) = a_1 ... a_i, length n+1.
struct PathTrace {
  std::vector<GroupElement> prefixes;
};

PathTrace trace(const GroupSpec& spec, std::span<const Letter> word);

/// [x, y] = x y x^-1 y^-1 as a word (not reduced).
Word commutator(std::span<const Letter> x, std::span<const Letter> y);

/// Homomorphism Filiform4 -> Heisenberg3, (v1,v2,v3;m) -> (m, v3, v2).
GroupElement filiform_to_heisenberg(const GroupElement& g);
/// Homomorphism Heisenberg3 -> FreeAbelian(2), (x,y,z) -> (x,y).
GroupElement heisenberg_to_z2(const GroupElement& g);
/// Abelianisation: exponent sums of the generators.
GroupElement abelianize(std::span<const Letter> word, int generator_count);

}  // namespace dehn
