#include <algorithm>
#include <cstdlib>
#include <map>

#include "dehn/error.hpp"
#include "dehn/filling.hpp"

namespace dehn {

CentralExtensionEval central_extension(const GroupSpec& base) {
  switch (base.kind()) {
    case GroupKind::FreeAbelian: {
      const int d = base.generator_count();
      if (d < 2 || d > 4) throw Unsupported("no central extension registered for " + base.id());
      CentralExtensionEval ev{base, GroupSpec::free_nilpotent2(d), {}, 2};
      for (int i = d; i < ev.extension.arity(); ++i) ev.central_indices.push_back(i);
      return ev;
    }
    case GroupKind::Heisenberg3:
      return {base, GroupSpec::filiform4(), {0}, 3};
    default:
      throw Unsupported("no central extension registered for " + base.id());
  }
}

std::vector<std::int64_t> central_coordinates(const CentralExtensionEval& ev, std::span<const Letter> w) {
  if (!ev.base.is_identity(eval_word(ev.base, w)))
    throw DomainError("central_coordinates: word is not a loop in " + ev.base.id());
  const GroupElement g = eval_word(ev.extension, w);
  std::vector<std::int64_t> out;
  for (int i : ev.central_indices) out.push_back(g[i]);
  return out;
}

std::int64_t centralized_area(const GroupSpec& spec, std::span<const Letter> w) {
  if (spec.kind() == GroupKind::FreeAbelian && spec.generator_count() == 1) {
    if (!spec.is_identity(eval_word(spec, w))) throw DomainError("centralized_area: word is not a loop");
    return 0;
  }
  std::int64_t s = 0;
  for (std::int64_t v : central_coordinates(central_extension(spec), w)) s += std::llabs(v);
  return s;
}

std::int64_t winding_area(std::span<const Letter> w) {
  std::int64_t x = 0, y = 0;
  // signed horizontal crossings per (column, height)
  std::map<std::int64_t, std::map<std::int64_t, std::int64_t>> columns;
  for (Letter l : w) {
    if (l.is_lazy()) continue;
    if (l.generator() > 1) throw InvalidWord("winding_area: word is not over Z^2 generators");
    if (l.generator() == 0) {
      if (l.inverted()) {
        columns[x - 1][y] -= 1;
        --x;
      } else {
        columns[x][y] += 1;
        ++x;
      }
    } else {
      y += l.inverted() ? -1 : 1;
    }
  }
  if (x != 0 || y != 0) throw DomainError("winding_area: word is not a loop in Z^2");
  std::int64_t area = 0;
  for (const auto& [col, heights] : columns) {
    // winding of cell (col, j) = sum of crossings at heights > j
    std::int64_t above = 0;
    std::int64_t prev = 0;
    bool first = true;
    for (auto it = heights.rbegin(); it != heights.rend(); ++it) {
      if (!first) area += std::llabs(above) * (prev - it->first);
      above += it->second;
      prev = it->first;
      first = false;
    }
  }
  return area;
}

std::vector<DistortionPoint> distortion_probe(const CentralExtensionEval& ev, int radius) {
  if (radius < 0) throw DomainError("distortion_probe: negative radius");
  std::vector<DistortionPoint> out;
  const Letter a = Letter::gen(0), b = Letter::gen(1);
  for (int r = 0; r <= radius; ++r) {
    const Word ar(static_cast<std::size_t>(r), a), br(static_cast<std::size_t>(r), b);
    Word w = commutator(ar, br);
    if (ev.distortion_degree == 3) w = commutator(ar, w);
    std::int64_t best = 0;
    for (std::int64_t v : central_coordinates(ev, w)) best += std::llabs(v);
    out.push_back({r, static_cast<std::int64_t>(free_reduce(w).size()), best});
  }
  return out;
}

}  // namespace dehn
