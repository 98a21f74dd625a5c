#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "dehn/error.hpp"
#include "dehn/simd/kernels.hpp"
#include "dehn/walk.hpp"

namespace dehn {

namespace {

GroupElement row_key(const GroupSpec& spec, GroupElement g) {
  g[spec.central_axis()] = 0;
  return g;
}

}  // namespace

StepMeasure step_measure(const GroupSpec& spec) {
  StepMeasure m{spec, {}, {}, {}};
  const int d = spec.generator_count();
  const double p = 1.0 / (2 * d + 1);
  for (int u = 0; u <= 2 * d; ++u) {
    const Letter l = letter_from_index(u);
    m.letters.push_back(l);
    m.elements.push_back(spec.letter_element(l));
    m.probabilities.push_back(p);
  }
  return m;
}

ProbabilityTable ProbabilityTable::delta(const GroupSpec& spec, double truncation_ratio) {
  if (!(truncation_ratio >= 0 && truncation_ratio < 1)) throw DomainError("truncation ratio must lie in [0, 1)");
  ProbabilityTable t(spec, truncation_ratio);
  t.rows_.push_back({spec.identity(), 0, {1.0}});
  t.rebuild_index();
  return t;
}

void ProbabilityTable::rebuild_index() {
  index_.clear();
  index_.reserve(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) index_.emplace(rows_[i].key, static_cast<std::uint32_t>(i));
}

const ProbabilityTable::Row* ProbabilityTable::find_row(const GroupElement& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? nullptr : &rows_[it->second];
}

double ProbabilityTable::at(const GroupElement& g) const {
  const Row* r = find_row(row_key(spec_, g));
  if (!r) return 0.0;
  const std::int64_t off = g[spec_.central_axis()] - r->lo;
  if (off < 0 || off >= static_cast<std::int64_t>(r->values.size())) return 0.0;
  return r->values[static_cast<std::size_t>(off)];
}

double ProbabilityTable::total_mass() const {
  const auto& k = simd::active_kernels();
  double s = 0;
  for (const auto& r : rows_) s += k.sum(r.values.data(), r.values.size());
  return s;
}

double ProbabilityTable::max_entry() const {
  const auto& k = simd::active_kernels();
  double m = 0;
  for (const auto& r : rows_) m = std::max(m, k.max_value(r.values.data(), r.values.size()));
  return m;
}

std::size_t ProbabilityTable::support_size() const {
  std::size_t n = 0;
  for (const auto& r : rows_)
    for (double v : r.values) n += v != 0.0;
  return n;
}

std::size_t ProbabilityTable::stored_values() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.values.size();
  return n;
}

void ProbabilityTable::for_each(const std::function<void(const GroupElement&, double)>& fn) const {
  const int c = spec_.central_axis();
  for (const auto& r : rows_) {
    GroupElement g = r.key;
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      if (r.values[i] == 0.0) continue;
      g[c] = r.lo + static_cast<std::int64_t>(i);
      fn(g, r.values[i]);
    }
  }
}

ProbabilityTable convolve(const ProbabilityTable& table, const StepMeasure& m) {
  if (!(table.spec_ == m.spec)) throw DomainError("convolve: measure and table belong to different groups");
  const GroupSpec& spec = table.spec_;
  const int c = spec.central_axis();
  const std::size_t L = m.size();

  struct Target {
    std::uint32_t row;
    std::int64_t shift;
  };
  // Targets of (source row, letter), shared by both passes.
  std::vector<Target> targets(table.rows_.size() * L);
  std::unordered_map<GroupElement, std::uint32_t, GroupElementHash> slot;
  struct Span {
    GroupElement key;
    std::int64_t lo = std::numeric_limits<std::int64_t>::max();
    std::int64_t hi = std::numeric_limits<std::int64_t>::min();
  };
  std::vector<Span> spans;
  slot.reserve(table.rows_.size() * 2);

  for (std::size_t i = 0; i < table.rows_.size(); ++i) {
    const auto& src = table.rows_[i];
    const std::int64_t len = static_cast<std::int64_t>(src.values.size());
    for (std::size_t j = 0; j < L; ++j) {
      const GroupElement moved = spec.apply(src.key, m.letters[j]);
      const std::int64_t shift = moved[c];
      const GroupElement key = row_key(spec, moved);
      auto [it, fresh] = slot.emplace(key, static_cast<std::uint32_t>(spans.size()));
      if (fresh) spans.push_back({key});
      Span& s = spans[it->second];
      s.lo = std::min(s.lo, src.lo + shift);
      s.hi = std::max(s.hi, src.lo + shift + len);
      targets[i * L + j] = {it->second, shift};
    }
  }

  std::vector<std::uint32_t> order(spans.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return spans[a].key < spans[b].key; });
  std::vector<std::uint32_t> rank(spans.size());
  for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;

  ProbabilityTable out(spec, table.ratio_);
  out.steps_ = table.steps_ + 1;
  out.lost_ = table.lost_;
  out.rows_.resize(spans.size());
  for (std::uint32_t r = 0; r < order.size(); ++r) {
    const Span& s = spans[order[r]];
    auto& row = out.rows_[r];
    row.key = s.key;
    row.lo = s.lo;
    row.values.assign(static_cast<std::size_t>(s.hi - s.lo), 0.0);
  }

  const auto& k = simd::active_kernels();
  for (std::size_t i = 0; i < table.rows_.size(); ++i) {
    const auto& src = table.rows_[i];
    for (std::size_t j = 0; j < L; ++j) {
      const Target t = targets[i * L + j];
      auto& dst = out.rows_[rank[t.row]];
      const std::size_t off = static_cast<std::size_t>(src.lo + t.shift - dst.lo);
      k.axpy(dst.values.data() + off, src.values.data(), src.values.size(), m.probabilities[j]);
    }
  }

  if (out.ratio_ > 0) {
    const double floor = out.ratio_ * out.max_entry();
    for (auto& row : out.rows_) out.lost_ += k.truncate_below(row.values.data(), row.values.size(), floor);
  }
  // trim zero margins and empty rows
  std::vector<ProbabilityTable::Row> kept;
  kept.reserve(out.rows_.size());
  for (auto& row : out.rows_) {
    auto first = std::find_if(row.values.begin(), row.values.end(), [](double v) { return v != 0.0; });
    if (first == row.values.end()) continue;
    auto last = std::find_if(row.values.rbegin(), row.values.rend(), [](double v) { return v != 0.0; }).base();
    row.lo += first - row.values.begin();
    row.values = std::vector<double>(first, last);
    kept.push_back(std::move(row));
  }
  out.rows_ = std::move(kept);
  out.rebuild_index();
  return out;
}

ExactTable::ExactTable(const GroupSpec& spec) : spec_(spec) { counts_[spec.identity()] = 1; }

std::uint64_t ExactTable::count(const GroupElement& g) const {
  auto it = counts_.find(g);
  return it == counts_.end() ? 0 : it->second;
}

double ExactTable::probability(const GroupElement& g) const {
  return static_cast<double>(count(g)) / static_cast<double>(denom_);
}

void ExactTable::step() {
  const std::uint64_t width = 2 * static_cast<std::uint64_t>(spec_.generator_count()) + 1;
  std::uint64_t next_denom;
  if (__builtin_mul_overflow(denom_, width, &next_denom)) throw OverflowError("exact table denominator overflows 64 bits");
  std::map<GroupElement, std::uint64_t> next;
  for (const auto& [g, c] : counts_)
    for (std::uint64_t u = 0; u < width; ++u) next[spec_.apply(g, letter_from_index(static_cast<int>(u)))] += c;
  counts_ = std::move(next);
  denom_ = next_denom;
  ++steps_;
}

ReturnTables return_tables(const GroupSpec& spec, int n, std::size_t max_bytes, double truncation_ratio) {
  if (n < 0) throw DomainError("return_tables: n must be non-negative");
  const StepMeasure m = step_measure(spec);
  ReturnTables out{spec, {}};
  out.tables.reserve(static_cast<std::size_t>(n) + 1);
  out.tables.push_back(ProbabilityTable::delta(spec, truncation_ratio));
  std::size_t bytes = sizeof(double);
  for (int t = 1; t <= n; ++t) {
    out.tables.push_back(convolve(out.tables.back(), m));
    bytes += out.tables.back().stored_values() * sizeof(double);
    if (bytes > max_bytes)
      throw BudgetExceeded("return tables for " + spec.id() + " at n=" + std::to_string(n) +
                           " exceed the memory budget at t=" + std::to_string(t) +
                           "; use the rejection or projected sampler");
  }
  return out;
}

void write_csv(std::ostream& out, const ProbabilityTable& table) {
  const int k = table.spec().arity();
  for (int i = 0; i < k; ++i) out << 'c' << i << ',';
  out << "probability\n";
  char buf[32];
  table.for_each([&](const GroupElement& g, double p) {
    for (int i = 0; i < k; ++i) out << g[i] << ',';
    std::snprintf(buf, sizeof buf, "%.17g", p);
    out << buf << '\n';
  });
}

}  // namespace dehn
