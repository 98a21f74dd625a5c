#include <bit>

#include "dehn/error.hpp"
#include "dehn/filling.hpp"
#include "dehn/metric.hpp"

namespace dehn {

std::vector<int> dyadic_indices(int n, int level) {
  if (n < 0 || level < 0 || level > 30) throw DomainError("dyadic_indices: bad arguments");
  const std::int64_t parts = std::int64_t{1} << level;
  std::vector<int> idx;
  idx.reserve(static_cast<std::size_t>(parts) + 1);
  for (std::int64_t j = 0; j <= parts; ++j) idx.push_back(static_cast<int>(j * n / parts));
  return idx;
}

namespace {

// Appends P T P^-1 for each factor T of `local`, P given as its inverse.
void append_conjugated(FillingCertificate& out, const FillingCertificate& local, const Word& pinv) {
  for (const auto& s : local.steps) {
    Word conj = s.conjugator;
    append_reduced(conj, pinv);
    out.steps.push_back({std::move(conj), s.relator, s.sign});
  }
}

}  // namespace

FillingCertificate dyadic_fill(const GroupSpec& spec, std::span<const Letter> loop) {
  for (Letter l : loop) spec.check(l);
  const int n = static_cast<int>(loop.size());
  const PathTrace tr = trace(spec, loop);
  if (!spec.is_identity(tr.prefixes.back())) throw DomainError("dyadic_fill: word is not a loop");
  FillingCertificate cert;
  cert.target.assign(loop.begin(), loop.end());
  if (n == 0) return cert;

  const int levels = std::bit_width(static_cast<unsigned>(n)) - 1;  // floor(log2 n)
  const auto metric = shared_metric(spec, n / 2 + 1);
  auto vertex = [&](int i) -> const GroupElement& { return tr.prefixes[static_cast<std::size_t>(i)]; };

  // stitch: bigons between arcs of w and the finest polygon edges
  {
    const auto idx = dyadic_indices(n, levels);
    Word prefix;
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
      const GroupElement& x = vertex(idx[k]);
      const GroupElement& y = vertex(idx[k + 1]);
      Word arc;
      for (int i = idx[k]; i < idx[k + 1]; ++i)
        if (!loop[static_cast<std::size_t>(i)].is_lazy()) arc.push_back(loop[static_cast<std::size_t>(i)]);
      if (arc.size() == 2) {
        const FillingCertificate bigon = triangle_fill(spec, x, spec.apply(x, arc[0]), y);
        append_conjugated(cert, bigon, inverse_word(prefix));
      }
      append_reduced(prefix, metric->geodesic(x, y));
    }
  }
  // triangles, finest level first
  for (int i = levels - 1; i >= 0; --i) {
    const auto outer = dyadic_indices(n, i);
    const auto inner = dyadic_indices(n, i + 1);
    Word prefix;
    for (std::size_t j = 0; j + 1 < outer.size(); ++j) {
      const GroupElement& x = vertex(outer[j]);
      const GroupElement& u = vertex(inner[2 * j + 1]);
      const GroupElement& y = vertex(outer[j + 1]);
      const FillingCertificate tri = triangle_fill(spec, x, u, y);
      append_conjugated(cert, tri, inverse_word(prefix));
      append_reduced(prefix, metric->geodesic(x, y));
    }
  }
  return cert;
}

}  // namespace dehn
