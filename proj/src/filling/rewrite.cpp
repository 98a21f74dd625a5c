#include <limits>
#include <map>
#include <optional>
#include <mutex>

#include "dehn/error.hpp"
#include "dehn/filling.hpp"
#include "dehn/metric.hpp"

namespace dehn {

namespace {

// Local certificates for rule loops, found once by exact search.
const FillingCertificate& local_certificate(const GroupSpec& spec, const Word& loop) {
  static std::mutex mu;
  static std::map<std::pair<std::string, std::string>, FillingCertificate> cache;
  std::lock_guard lock(mu);
  auto key = std::make_pair(spec.id(), format_word(loop));
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  SearchLimits limits;
  limits.max_area = 4;
  auto cert = exact_area_certificate(spec, loop, limits);
  if (!cert) throw Error("no local certificate for rule loop " + key.second + " in " + spec.id());
  return cache.emplace(key, std::move(*cert)).first->second;
}

// Token: a generator letter, or (heis) a commutator block c^sign with
// c = abAB and c^-1 = baBA.
struct Token {
  Letter letter;
  int block = 0;

  bool is_block() const { return block != 0; }
};

Word spell(const Token& t) {
  if (t.block > 0) return parse_word("abAB");
  if (t.block < 0) return parse_word("baBA");
  return {t.letter};
}

Word spell(const std::vector<Token>& ts) {
  Word w;
  for (const auto& t : ts) {
    Word s = spell(t);
    w.insert(w.end(), s.begin(), s.end());
  }
  return w;
}

class Collector {
 public:
  /// With cert == nullptr only the area is counted.
  Collector(const GroupSpec& spec, FillingCertificate* cert, bool reversed = false)
      : spec_(spec), cert_(cert), reversed_(reversed) {}

  std::size_t area() const { return area_; }

  void push(Letter l) {
    if (l.is_lazy()) return;
    if (spec_.kind() == GroupKind::FreeAbelian) {
      push_abelian(l);
    } else {
      push_heisenberg(l);
    }
  }

  bool empty() const { return nf_.empty(); }

 private:
  // nf_[k..k+|u|) spells u; replace by v and log the loop u v^-1 conjugated
  // by the spelled prefix.
  void rewrite(std::size_t k, std::size_t width, const std::vector<Token>& v) {
    const std::vector<Token> u(nf_.begin() + static_cast<std::ptrdiff_t>(k),
                               nf_.begin() + static_cast<std::ptrdiff_t>(k + width));
    Word loop = spell(u);
    const Word vinv = inverse_word(spell(v));
    loop.insert(loop.end(), vinv.begin(), vinv.end());
    const FillingCertificate& local = local_certificate(spec_, loop);
    area_ += local.steps.size();
    if (cert_ && !local.steps.empty()) {
      const Word pinv = inverse_word(spell(std::vector<Token>(nf_.begin(), nf_.begin() + static_cast<std::ptrdiff_t>(k))));
      for (const auto& s : local.steps) {
        Word conj = s.conjugator;
        append_reduced(conj, pinv);
        cert_->steps.push_back({std::move(conj), s.relator, s.sign});
      }
    }
    nf_.erase(nf_.begin() + static_cast<std::ptrdiff_t>(k), nf_.begin() + static_cast<std::ptrdiff_t>(k + width));
    nf_.insert(nf_.begin() + static_cast<std::ptrdiff_t>(k), v.begin(), v.end());
  }

  static bool cancels(const Token& x, const Token& y) {
    if (x.is_block() || y.is_block()) return x.block == -y.block && x.is_block();
    return x.letter == y.letter.inverse();
  }

  // settle token at pos against its left neighbour
  void settle(std::size_t pos) {
    if (pos > 0 && cancels(nf_[pos - 1], nf_[pos]))
      nf_.erase(nf_.begin() + static_cast<std::ptrdiff_t>(pos - 1), nf_.begin() + static_cast<std::ptrdiff_t>(pos + 1));
  }

  void push_abelian(Letter l) {
    nf_.push_back({l, 0});
    std::size_t pos = nf_.size() - 1;
    while (pos > 0 && rank(nf_[pos - 1].letter) > rank(l)) {
      rewrite(pos - 1, 2, {nf_[pos], nf_[pos - 1]});
      --pos;
    }
    settle(pos);
  }

  void push_heisenberg(Letter l) {
    nf_.push_back({l, 0});
    std::size_t pos = nf_.size() - 1;
    while (pos > 0 && nf_[pos - 1].is_block()) {
      rewrite(pos - 1, 2, {nf_[pos], nf_[pos - 1]});
      --pos;
    }
    if (l.generator() == 0) {
      const int e = l.exponent();
      while (pos > 0 && !nf_[pos - 1].is_block() && nf_[pos - 1].letter.generator() == 1) {
        const Token b = nf_[pos - 1];
        const int h = b.letter.exponent();
        rewrite(pos - 1, 2, {nf_[pos], b, Token{Letter::lazy(), -e * h}});
        --pos;
        // carry the new block right to the tail
        std::size_t c = pos + 2;
        while (c + 1 < nf_.size() && !nf_[c + 1].is_block()) {
          rewrite(c, 2, {nf_[c + 1], nf_[c]});
          ++c;
        }
        if (c + 1 < nf_.size() && cancels(nf_[c], nf_[c + 1]))
          nf_.erase(nf_.begin() + static_cast<std::ptrdiff_t>(c), nf_.begin() + static_cast<std::ptrdiff_t>(c + 2));
      }
    }
    settle(pos);
  }

  int rank(Letter l) const { return reversed_ ? -l.generator() : l.generator(); }

  const GroupSpec& spec_;
  FillingCertificate* cert_;
  bool reversed_;
  std::size_t area_ = 0;
  std::vector<Token> nf_;
};

void require_filler(const GroupSpec& spec) {
  if (spec.kind() != GroupKind::FreeAbelian && spec.kind() != GroupKind::Heisenberg3)
    throw Unsupported("no rewriting filler for " + spec.id());
}

}  // namespace

FillingCertificate rewrite_fill(const GroupSpec& spec, std::span<const Letter> loop) {
  require_filler(spec);
  for (Letter l : loop) spec.check(l);
  if (!spec.is_identity(eval_word(spec, loop))) throw DomainError("rewrite_fill: word is not a loop");

  // loop =_F X core X^-1 with core cyclically reduced
  const Word u = free_reduce(loop);
  std::size_t k = 0;
  while (2 * k + 2 <= u.size() && u[k] == u[u.size() - 1 - k].inverse()) ++k;
  const Word x(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(k));
  const Word core(u.begin() + static_cast<std::ptrdiff_t>(k), u.end() - static_cast<std::ptrdiff_t>(k));

  // Every rotation of the core (and for Z^d both generator orders) is
  // collected in counting mode; the smallest area is then replayed.
  const bool abelian = spec.kind() == GroupKind::FreeAbelian;
  const std::size_t starts = std::max<std::size_t>(core.size(), 1);
  auto collect = [&](std::size_t s, bool reversed, FillingCertificate* out) {
    Collector col(spec, out, reversed);
    for (std::size_t i = 0; i < core.size(); ++i) col.push(core[(s + i) % core.size()]);
    if (!col.empty()) throw std::logic_error("collection of a loop left a non-trivial normal form");
    return col.area();
  };
  std::size_t best_area = std::numeric_limits<std::size_t>::max(), best_s = 0;
  bool best_rev = false;
  for (std::size_t s = 0; s < starts; ++s) {
    for (bool reversed : {false, true}) {
      if (reversed && !abelian) continue;
      const std::size_t a = collect(s, reversed, nullptr);
      if (a < best_area) {
        best_area = a;
        best_s = s;
        best_rev = reversed;
      }
    }
  }
  FillingCertificate local;
  collect(best_s, best_rev, &local);
  // rotation = Q^-1 core Q with Q = core[0..s); conjugate back by X Q
  Word q = x;
  q.insert(q.end(), core.begin(), core.begin() + static_cast<std::ptrdiff_t>(best_s));
  const Word qinv = inverse_word(free_reduce(q));
  std::optional<FillingCertificate> best{FillingCertificate{}};
  for (auto& st : local.steps) {
    append_reduced(st.conjugator, qinv);
    best->steps.push_back(std::move(st));
  }
  best->target.assign(loop.begin(), loop.end());
  return std::move(*best);
}

FillingCertificate triangle_fill(const GroupSpec& spec, const GroupElement& x, const GroupElement& y,
                                 const GroupElement& z) {
  require_filler(spec);
  int cap = 64;
  std::shared_ptr<const WordMetric> metric;
  for (;;) {
    metric = shared_metric(spec, cap);
    if (metric->try_norm(spec.multiply(spec.inverse(x), y)) && metric->try_norm(spec.multiply(spec.inverse(y), z)) &&
        metric->try_norm(spec.multiply(spec.inverse(z), x)))
      break;
    if (cap >= 4096) throw CapExceeded("triangle_fill: side length", cap);
    cap *= 2;
  }
  Word loop = metric->geodesic(x, y);
  const Word s2 = metric->geodesic(y, z), s3 = metric->geodesic(z, x);
  loop.insert(loop.end(), s2.begin(), s2.end());
  loop.insert(loop.end(), s3.begin(), s3.end());
  return rewrite_fill(spec, loop);
}

}  // namespace dehn
