#include <array>

#include "dehn/error.hpp"
#include "dehn/walk.hpp"

namespace dehn {

const char* to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::Rejection: return "rejection";
    case SamplerKind::Bridge: return "bridge";
    case SamplerKind::Projected: return "projected";
    case SamplerKind::Enumeration: return "enumeration";
  }
  return "?";
}

Letter letter_from_index(int u) {
  if (u == 0) return Letter::lazy();
  return Letter::gen((u - 1) / 2, (u - 1) % 2 == 1);
}

int letter_index(Letter l) { return l.is_lazy() ? 0 : 1 + l.rank(); }

LazyWord sample_lazy_word(const GroupSpec& spec, int n, CounterRng& rng) {
  if (n < 0) throw DomainError("word length must be non-negative");
  const std::uint64_t width = 2 * static_cast<std::uint64_t>(spec.generator_count()) + 1;
  LazyWord w(static_cast<std::size_t>(n));
  for (auto& l : w) l = letter_from_index(static_cast<int>(rng.below(width)));
  return w;
}

LoopSample sample_loop_rejection(const GroupSpec& spec, int n, CounterRng& rng, std::int64_t max_attempts) {
  for (std::int64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    LazyWord w = sample_lazy_word(spec, n, rng);
    if (spec.is_identity(eval_word(spec, w))) {
      LoopSample s;
      s.trace = trace(spec, w);
      s.word = std::move(w);
      s.method = SamplerKind::Rejection;
      s.seed = rng.seed();
      s.stream = rng.stream();
      s.attempts = attempt;
      return s;
    }
  }
  throw SamplerFailure("rejection sampler found no loop of length " + std::to_string(n), max_attempts);
}

namespace {

LazyWord bridge_word(const GroupSpec& spec, int n, CounterRng& rng, const ReturnTables& tables) {
  if (!(tables.spec == spec)) throw DomainError("bridge tables belong to " + tables.spec.id());
  if (n < 0) throw DomainError("word length must be non-negative");
  if (n > 0 && tables.horizon() < n - 1)
    throw DomainError("bridge tables reach t=" + std::to_string(tables.horizon()) + ", need " + std::to_string(n - 1));
  const StepMeasure m = step_measure(spec);
  LazyWord w;
  w.reserve(static_cast<std::size_t>(n));
  GroupElement x = spec.identity();
  std::vector<double> weight(m.size());
  for (int t = 0; t < n; ++t) {
    const int rest = n - t - 1;
    double total = 0;
    for (std::size_t j = 0; j < m.size(); ++j) {
      const GroupElement y = spec.apply(x, m.letters[j]);
      weight[j] = m.probabilities[j] * tables.p(rest, spec.inverse(y));
      total += weight[j];
    }
    if (!(total > 0)) throw std::logic_error("bridge sampler reached a state with zero normaliser");
    const double u = rng.uniform01() * total;
    double acc = 0;
    std::size_t pick = m.size();
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (weight[j] == 0.0) continue;
      acc += weight[j];
      pick = j;
      if (u < acc) break;
    }
    w.push_back(m.letters[pick]);
    spec.apply_in_place(x, m.letters[pick]);
  }
  if (!spec.is_identity(x)) throw std::logic_error("bridge sampler produced a non-loop");
  return w;
}

}  // namespace

LoopSample sample_loop_bridge(const GroupSpec& spec, int n, CounterRng& rng, const ReturnTables& tables) {
  LoopSample s;
  s.word = bridge_word(spec, n, rng, tables);
  s.trace = trace(spec, s.word);
  s.method = SamplerKind::Bridge;
  s.seed = rng.seed();
  s.stream = rng.stream();
  return s;
}

LoopSample sample_loop_projected(const GroupSpec& spec, int n, CounterRng& rng, const ReturnTables& abelian_tables,
                                 std::int64_t max_attempts) {
  const GroupSpec& base = abelian_tables.spec;
  if (base.kind() != GroupKind::FreeAbelian || base.generator_count() != spec.generator_count())
    throw DomainError("projected sampler needs tables of the abelianisation of " + spec.id());
  for (std::int64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    LazyWord w = bridge_word(base, n, rng, abelian_tables);
    if (spec.is_identity(eval_word(spec, w))) {
      LoopSample s;
      s.trace = trace(spec, w);
      s.word = std::move(w);
      s.method = SamplerKind::Projected;
      s.seed = rng.seed();
      s.stream = rng.stream();
      s.attempts = attempt;
      return s;
    }
  }
  throw SamplerFailure("projected sampler found no loop of length " + std::to_string(n), max_attempts);
}

double hat_p(const GroupSpec& spec, const GroupElement& x, const GroupElement& y, int t, int n,
             const ReturnTables& tables) {
  if (t < 0 || t >= n) throw DomainError("hat_p needs 0 <= t < n");
  if (tables.horizon() < n - t - 1) throw DomainError("hat_p: return tables too short");
  const StepMeasure m = step_measure(spec);
  const int rest = n - t - 1;
  double total = 0, hit = 0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    const GroupElement w = spec.apply(x, m.letters[j]);
    const double v = m.probabilities[j] * tables.p(rest, spec.inverse(w));
    total += v;
    if (w == y) hit += v;
  }
  if (!(total > 0)) throw DomainError("hat_p: x=" + to_string(x) + " cannot reach e in the remaining steps");
  return hit / total;
}

}  // namespace dehn
