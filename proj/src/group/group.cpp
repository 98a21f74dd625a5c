#include "dehn/group.hpp"

#include <charconv>
#include <sstream>

namespace dehn {
namespace {

std::int64_t add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("coordinate overflow in addition");
  return r;
}

std::int64_t mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("coordinate overflow in product");
  return r;
}

// m choose 2, valid for negative m: the (1,3) entry of J^m.
std::int64_t choose2(std::int64_t m) {
  return mul(m, add(m, -1)) / 2;
}

int pair_index(int i, int j, int k) {
  // position of M_ij (i<j) in lexicographic order, offset by k
  return k + i * (2 * k - i - 1) / 2 + (j - i - 1);
}

}  // namespace

char Letter::to_char() const {
  if (is_lazy()) return '.';
  const char base = inverted() ? 'A' : 'a';
  return static_cast<char>(base + generator());
}

Word parse_word(std::string_view text) {
  Word w;
  w.reserve(text.size());
  for (char ch : text) {
    if (ch == '.') {
      w.push_back(Letter::lazy());
    } else if (ch >= 'a' && ch <= 'z') {
      w.push_back(Letter::gen(ch - 'a'));
    } else if (ch >= 'A' && ch <= 'Z') {
      w.push_back(Letter::gen(ch - 'A', true));
    } else if (ch == ' ' || ch == '\t') {
      continue;
    } else {
      throw InvalidWord(std::string("unexpected character '") + ch + "' in word");
    }
  }
  return w;
}

std::string format_word(std::span<const Letter> word) {
  std::string s;
  s.reserve(word.size());
  for (Letter l : word) s.push_back(l.to_char());
  return s;
}

Word inverse_word(std::span<const Letter> word) {
  Word r(word.rbegin(), word.rend());
  for (Letter& l : r) l = l.inverse();
  return r;
}

void append_reduced(Word& acc, std::span<const Letter> word) {
  for (Letter l : word) {
    if (l.is_lazy()) continue;
    if (!acc.empty() && acc.back() == l.inverse()) {
      acc.pop_back();
    } else {
      acc.push_back(l);
    }
  }
}

Word free_reduce(std::span<const Letter> word) {
  Word r;
  r.reserve(word.size());
  append_reduced(r, word);
  return r;
}

Word commutator(std::span<const Letter> x, std::span<const Letter> y) {
  Word w(x.begin(), x.end());
  w.insert(w.end(), y.begin(), y.end());
  Word xi = inverse_word(x), yi = inverse_word(y);
  w.insert(w.end(), xi.begin(), xi.end());
  w.insert(w.end(), yi.begin(), yi.end());
  return w;
}

std::string to_string(const GroupElement& g) {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < g.arity; ++i) {
    if (i) os << ',';
    os << g.coords[i];
  }
  os << ')';
  return os.str();
}

GroupSpec::GroupSpec(GroupKind kind, int param) : kind_(kind), param_(param) {
  auto gen = [](int i) { return Word{Letter::gen(i)}; };
  switch (kind) {
    case GroupKind::FreeAbelian:
      gens_ = param;
      arity_ = param;
      central_axis_ = param - 1;
      id_ = "z" + std::to_string(param);
      for (int i = 0; i < param; ++i)
        for (int j = i + 1; j < param; ++j) relators_.push_back(commutator(gen(i), gen(j)));
      break;
    case GroupKind::Heisenberg3: {
      gens_ = 2;
      arity_ = 3;
      central_axis_ = 2;
      id_ = "heis3";
      const Word c = commutator(gen(0), gen(1));
      relators_.push_back(free_reduce(commutator(gen(0), c)));
      relators_.push_back(free_reduce(commutator(gen(1), c)));
      break;
    }
    case GroupKind::FreeNilpotentClass2:
      gens_ = param;
      arity_ = param + param * (param - 1) / 2;
      central_axis_ = arity_ - 1;
      id_ = "fnil2-" + std::to_string(param);
      for (int i = 0; i < param; ++i)
        for (int j = 0; j < param; ++j)
          for (int l = j + 1; l < param; ++l)
            relators_.push_back(free_reduce(commutator(gen(i), commutator(gen(j), gen(l)))));
      break;
    case GroupKind::Filiform4: {
      gens_ = 2;
      arity_ = 4;
      central_axis_ = 0;
      id_ = "filiform4";
      const Word t = gen(0), s = gen(1);
      const Word e2 = commutator(t, s);
      const Word e1 = commutator(t, e2);
      relators_.push_back(free_reduce(commutator(s, e2)));
      relators_.push_back(free_reduce(commutator(t, e1)));
      relators_.push_back(free_reduce(commutator(s, e1)));
      relators_.push_back(free_reduce(commutator(e2, e1)));
      break;
    }
  }
}

GroupSpec GroupSpec::free_abelian(int d) {
  if (d < 1 || d > kMaxArity) throw DomainError("FreeAbelian rank must be in [1, 10]");
  return GroupSpec(GroupKind::FreeAbelian, d);
}

GroupSpec GroupSpec::heisenberg3() { return GroupSpec(GroupKind::Heisenberg3, 2); }

GroupSpec GroupSpec::free_nilpotent2(int k) {
  if (k < 2 || k + k * (k - 1) / 2 > kMaxArity)
    throw DomainError("FreeNilpotentClass2 rank must be in [2, 4]");
  return GroupSpec(GroupKind::FreeNilpotentClass2, k);
}

GroupSpec GroupSpec::filiform4() { return GroupSpec(GroupKind::Filiform4, 2); }

GroupSpec GroupSpec::from_id(std::string_view id) {
  auto parse_int = [&](std::string_view digits) -> int {
    int v = 0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc{} || p != digits.data() + digits.size() || digits.empty())
      throw DomainError("unknown group id '" + std::string(id) + "'");
    return v;
  };
  if (id == "heis3") return heisenberg3();
  if (id == "filiform4") return filiform4();
  try {
    if (id.starts_with("fnil2-")) return free_nilpotent2(parse_int(id.substr(6)));
    if (id.starts_with("z")) {
      const int d = parse_int(id.substr(1));
      if (d <= 4) return free_abelian(d);
    }
  } catch (const DomainError&) {
  }
  throw DomainError("unknown group id '" + std::string(id) + "'");
}

int GroupSpec::growth_degree() const {
  switch (kind_) {
    case GroupKind::FreeAbelian: return param_;
    case GroupKind::Heisenberg3: return 4;
    case GroupKind::FreeNilpotentClass2: return param_ + param_ * (param_ - 1);
    case GroupKind::Filiform4: return 7;
  }
  return 0;
}

GroupElement GroupSpec::identity() const {
  GroupElement g;
  g.arity = static_cast<std::uint8_t>(arity_);
  return g;
}

GroupElement GroupSpec::element(std::span<const std::int64_t> coords) const {
  if (static_cast<int>(coords.size()) != arity_)
    throw DomainError("element of " + id_ + " needs " + std::to_string(arity_) + " coordinates");
  GroupElement g = identity();
  for (int i = 0; i < arity_; ++i) g.coords[i] = coords[i];
  return g;
}

void GroupSpec::check(Letter l) const {
  if (!valid(l))
    throw InvalidWord("letter '" + std::string(1, l.to_char()) + "' out of range for " + id_);
}

GroupElement GroupSpec::letter_element(Letter l) const {
  check(l);
  return apply(identity(), l);
}

bool GroupSpec::is_identity(const GroupElement& g) const {
  for (int i = 0; i < g.arity; ++i)
    if (g.coords[i] != 0) return false;
  return true;
}

void GroupSpec::apply_in_place(GroupElement& g, Letter l) const {
  if (l.is_lazy()) return;
  const int i = l.generator();
  const std::int64_t s = l.exponent();
  switch (kind_) {
    case GroupKind::FreeAbelian:
      g.coords[i] = add(g.coords[i], s);
      break;
    case GroupKind::Heisenberg3:
      if (i == 0) {
        g.coords[0] = add(g.coords[0], s);
      } else {
        g.coords[1] = add(g.coords[1], s);
        g.coords[2] = add(g.coords[2], s * g.coords[0]);
      }
      break;
    case GroupKind::FreeNilpotentClass2: {
      const int k = param_;
      for (int a = 0; a < i; ++a) {
        auto& m = g.coords[pair_index(a, i, k)];
        m = add(m, s * g.coords[a]);
      }
      g.coords[i] = add(g.coords[i], s);
      break;
    }
    case GroupKind::Filiform4:
      if (i == 0) {
        g.coords[3] = add(g.coords[3], s);
      } else {
        const std::int64_t m = g.coords[3];
        g.coords[0] = add(g.coords[0], mul(s, choose2(m)));
        g.coords[1] = add(g.coords[1], mul(s, m));
        g.coords[2] = add(g.coords[2], s);
      }
      break;
  }
}

GroupElement GroupSpec::apply(const GroupElement& g, Letter l) const {
  GroupElement r = g;
  apply_in_place(r, l);
  return r;
}

GroupElement GroupSpec::multiply(const GroupElement& a, const GroupElement& b) const {
  GroupElement r = identity();
  switch (kind_) {
    case GroupKind::FreeAbelian:
      for (int i = 0; i < arity_; ++i) r.coords[i] = add(a.coords[i], b.coords[i]);
      break;
    case GroupKind::Heisenberg3:
      r.coords[0] = add(a.coords[0], b.coords[0]);
      r.coords[1] = add(a.coords[1], b.coords[1]);
      r.coords[2] = add(add(a.coords[2], b.coords[2]), mul(a.coords[0], b.coords[1]));
      break;
    case GroupKind::FreeNilpotentClass2: {
      const int k = param_;
      for (int i = 0; i < k; ++i) r.coords[i] = add(a.coords[i], b.coords[i]);
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
          const int p = pair_index(i, j, k);
          r.coords[p] = add(add(a.coords[p], b.coords[p]), mul(a.coords[i], b.coords[j]));
        }
      break;
    }
    case GroupKind::Filiform4: {
      const std::int64_t m = a.coords[3];
      // J^m v' = (v1' + m v2' + C(m,2) v3', v2' + m v3', v3')
      const std::int64_t w1 = add(add(b.coords[0], mul(m, b.coords[1])), mul(choose2(m), b.coords[2]));
      const std::int64_t w2 = add(b.coords[1], mul(m, b.coords[2]));
      r.coords[0] = add(a.coords[0], w1);
      r.coords[1] = add(a.coords[1], w2);
      r.coords[2] = add(a.coords[2], b.coords[2]);
      r.coords[3] = add(m, b.coords[3]);
      break;
    }
  }
  return r;
}

GroupElement GroupSpec::inverse(const GroupElement& g) const {
  GroupElement r = identity();
  switch (kind_) {
    case GroupKind::FreeAbelian:
      for (int i = 0; i < arity_; ++i) r.coords[i] = mul(-1, g.coords[i]);
      break;
    case GroupKind::Heisenberg3:
      r.coords[0] = mul(-1, g.coords[0]);
      r.coords[1] = mul(-1, g.coords[1]);
      r.coords[2] = add(mul(-1, g.coords[2]), mul(g.coords[0], g.coords[1]));
      break;
    case GroupKind::FreeNilpotentClass2: {
      const int k = param_;
      for (int i = 0; i < k; ++i) r.coords[i] = mul(-1, g.coords[i]);
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
          const int p = pair_index(i, j, k);
          r.coords[p] = add(mul(-1, g.coords[p]), mul(g.coords[i], g.coords[j]));
        }
      break;
    }
    case GroupKind::Filiform4: {
      // (v;m)^-1 = (-J^{-m} v; -m)
      const std::int64_t m = mul(-1, g.coords[3]);
      const std::int64_t w1 = add(add(g.coords[0], mul(m, g.coords[1])), mul(choose2(m), g.coords[2]));
      const std::int64_t w2 = add(g.coords[1], mul(m, g.coords[2]));
      r.coords[0] = mul(-1, w1);
      r.coords[1] = mul(-1, w2);
      r.coords[2] = mul(-1, g.coords[2]);
      r.coords[3] = m;
      break;
    }
  }
  return r;
}

GroupElement eval_word(const GroupSpec& spec, std::span<const Letter> word) {
  GroupElement g = spec.identity();
  for (Letter l : word) {
    spec.check(l);
    spec.apply_in_place(g, l);
  }
  return g;
}

PathTrace trace(const GroupSpec& spec, std::span<const Letter> word) {
  PathTrace t;
  t.prefixes.reserve(word.size() + 1);
  GroupElement g = spec.identity();
  t.prefixes.push_back(g);
  for (Letter l : word) {
    spec.check(l);
    spec.apply_in_place(g, l);
    t.prefixes.push_back(g);
  }
  return t;
}

GroupElement filiform_to_heisenberg(const GroupElement& g) {
  GroupElement h;
  h.arity = 3;
  h.coords[0] = g.coords[3];
  h.coords[1] = g.coords[2];
  h.coords[2] = g.coords[1];
  return h;
}

GroupElement heisenberg_to_z2(const GroupElement& g) {
  GroupElement h;
  h.arity = 2;
  h.coords[0] = g.coords[0];
  h.coords[1] = g.coords[1];
  return h;
}

GroupElement abelianize(std::span<const Letter> word, int generator_count) {
  GroupElement h;
  h.arity = static_cast<std::uint8_t>(generator_count);
  for (Letter l : word) {
    if (l.is_lazy()) continue;
    if (l.generator() >= generator_count) throw InvalidWord("letter out of range in abelianize");
    h.coords[l.generator()] += l.exponent();
  }
  return h;
}

}  // namespace dehn
