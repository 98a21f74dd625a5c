#include <algorithm>
#include <cstdlib>
#include <set>
#include <string>
#include <unordered_map>

#include "dehn/error.hpp"
#include "dehn/filling.hpp"

namespace dehn {

namespace {

struct Insertion {
  Word word;  // X^-1 r^s X
  Word x;
  int relator;
  int sign;
};

std::string key_of(const Word& w) {
  std::string s(w.size(), '\0');
  for (std::size_t i = 0; i < w.size(); ++i) s[i] = static_cast<char>(w[i].raw());
  return s;
}

// Canonical cyclic class: cyclically reduce, then take the least rotation.
std::string cyclic_key(const Word& w) {
  std::size_t lo = 0, hi = w.size();
  while (hi - lo >= 2 && w[lo] == w[hi - 1].inverse()) {
    ++lo;
    --hi;
  }
  std::string s;
  for (std::size_t i = lo; i < hi; ++i) s.push_back(static_cast<char>(w[i].raw()));
  std::string best = s;
  for (std::size_t k = 1; k < s.size(); ++k) best = std::min(best, s.substr(k) + s.substr(0, k));
  return best;
}

class Search {
 public:
  Search(const GroupSpec& spec, SearchLimits limits) : spec_(spec), limits_(limits) {
    const auto& rel = spec.relators();
    std::set<std::string> seen;
    for (int i = 0; i < static_cast<int>(rel.size()); ++i) {
      max_len_ = std::max(max_len_, rel[i].size());
      for (int s : {1, -1}) {
        const Word r = s > 0 ? rel[i] : inverse_word(rel[i]);
        for (std::size_t k = 0; k < r.size(); ++k) {
          Word x(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(k));
          Word rot(r.begin() + static_cast<std::ptrdiff_t>(k), r.end());
          rot.insert(rot.end(), r.begin(), r.begin() + static_cast<std::ptrdiff_t>(k));
          if (!seen.insert(key_of(rot)).second) continue;
          inserts_.push_back({rot, x, i, s});
        }
      }
    }
    try {
      ext_ = central_extension(spec);
      for (const auto& r : rel) {
        std::int64_t effect = 0;
        const GroupElement g = eval_word(ext_->extension, r);
        for (int c : ext_->central_indices) effect += std::llabs(g[c]);
        max_effect_ = std::max(max_effect_, effect);
      }
    } catch (const Unsupported&) {
      ext_.reset();
    }
  }

  std::optional<FillingCertificate> run(std::span<const Letter> w) {
    Word start = free_reduce(w);
    if (!spec_.is_identity(eval_word(spec_, start))) throw DomainError("exact_area_search: word is not a loop");
    for (int bound = heuristic(start); bound <= limits_.max_area; ++bound) {
      visited_.clear();
      path_.clear();
      if (dfs(start, 0, bound)) {
        FillingCertificate cert;
        cert.steps = path_;
        cert.target.assign(w.begin(), w.end());
        return cert;
      }
      if (exhausted_) return std::nullopt;
    }
    return std::nullopt;
  }

 private:
  int heuristic(const Word& w) const {
    int h = static_cast<int>((w.size() + max_len_ - 1) / max_len_);
    if (ext_ && max_effect_ > 0) {
      const GroupElement g = eval_word(ext_->extension, w);
      std::int64_t s = 0;
      for (int c : ext_->central_indices) s += std::llabs(g[c]);
      h = std::max(h, static_cast<int>((s + max_effect_ - 1) / max_effect_));
    }
    return h;
  }

  bool dfs(const Word& w, int g, int bound) {
    if (w.empty()) return true;
    if (g + heuristic(w) > bound) return false;
    if (++nodes_ > limits_.max_nodes) {
      exhausted_ = true;
      return false;
    }
    auto [it, fresh] = visited_.emplace(cyclic_key(w), g);
    if (!fresh) {
      if (it->second <= g) return false;
      it->second = g;
    }
    for (std::size_t p = 0; p <= w.size(); ++p) {
      const Word prefix(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(p));
      const Word pinv = inverse_word(prefix);
      for (const auto& ins : inserts_) {
        Word next = prefix;
        append_reduced(next, ins.word);
        append_reduced(next, std::span<const Letter>(w).subspan(p));
        Word conj = ins.x;
        append_reduced(conj, pinv);
        path_.push_back({std::move(conj), ins.relator, -ins.sign});
        if (dfs(next, g + 1, bound)) return true;
        path_.pop_back();
        if (exhausted_) return false;
      }
    }
    return false;
  }

  const GroupSpec& spec_;
  SearchLimits limits_;
  std::vector<Insertion> inserts_;
  std::size_t max_len_ = 1;
  std::optional<CentralExtensionEval> ext_;
  std::int64_t max_effect_ = 0;
  std::unordered_map<std::string, int> visited_;
  std::vector<CertificateStep> path_;
  std::int64_t nodes_ = 0;
  bool exhausted_ = false;
};

}  // namespace

std::optional<FillingCertificate> exact_area_certificate(const GroupSpec& spec, std::span<const Letter> w,
                                                         SearchLimits limits) {
  for (Letter l : w) spec.check(l);
  return Search(spec, limits).run(w);
}

std::optional<int> exact_area_search(const GroupSpec& spec, std::span<const Letter> w, int budget) {
  SearchLimits limits;
  limits.max_area = budget;
  auto cert = exact_area_certificate(spec, w, limits);
  if (!cert) return std::nullopt;
  return static_cast<int>(cert->area());
}

}  // namespace dehn
