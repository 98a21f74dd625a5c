#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "dehn/error.hpp"
#include "dehn/metric.hpp"
#include "dehn/walk.hpp"

namespace dehn {

std::vector<HeatPoint> heat_kernel_at_identity(const GroupSpec& spec, const std::vector<int>& n_list,
                                               double truncation_ratio) {
  if (!std::is_sorted(n_list.begin(), n_list.end())) throw DomainError("n_list must be ascending");
  std::vector<HeatPoint> out;
  const StepMeasure m = step_measure(spec);
  ProbabilityTable table = ProbabilityTable::delta(spec, truncation_ratio);
  const GroupElement e = spec.identity();
  for (int n : n_list) {
    while (table.step_count() < n) table = convolve(table, m);
    out.push_back({n, table.at(e), table.lost_mass(), table.support_size()});
  }
  return out;
}

namespace {

struct Profile {
  // per distance r: extreme p over the sphere (max for the upper bound,
  // min over the lower-bound region)
  std::map<int, double> max_p;
  std::map<int, double> min_p_region;
  std::size_t region = 0;
  std::int64_t region_zero = 0;
};

std::vector<double> cprime_grid() {
  std::vector<double> g;
  for (double c = 0.01; c <= 1e4; c *= 1.02) g.push_back(c);
  return g;
}

double upper_c(const Profile& pr, int n, int D, double cp) {
  double c = 0;
  for (const auto& [r, p] : pr.max_p)
    c = std::max(c, p * std::pow(n, D / 2.0) * std::exp(double(r) * r / (cp * n)));
  return c;
}

double lower_c(const Profile& pr, int n, int D, double cp) {
  // smallest C with (C n)^(-D/2) exp(-C' r^2 / n) <= p
  double c = 0;
  for (const auto& [r, p] : pr.min_p_region)
    c = std::max(c, std::pow(p * std::exp(cp * double(r) * r / n), -2.0 / D) / n);
  return c;
}

}  // namespace

HscReport hsc_check(const GroupSpec& spec, const std::vector<int>& n_list, double c_double_prime,
                    double truncation_ratio) {
  if (n_list.empty() || !std::is_sorted(n_list.begin(), n_list.end()) || n_list.front() < 1)
    throw DomainError("hsc_check needs an ascending list of positive n");
  if (!(c_double_prime >= 1)) throw DomainError("C'' must be >= 1");
  HscReport rep{spec};
  rep.growth_degree = spec.growth_degree();
  rep.c_double_prime = c_double_prime;
  const int D = rep.growth_degree;
  const auto metric = shared_metric(spec, n_list.back());
  const StepMeasure m = step_measure(spec);
  ProbabilityTable table = ProbabilityTable::delta(spec, truncation_ratio);
  std::vector<Profile> profiles;
  std::vector<ProbabilityTable> kept;
  const auto grid = cprime_grid();

  for (int n : n_list) {
    while (table.step_count() < n) table = convolve(table, m);
    Profile pr;
    const double radius = n / c_double_prime;
    table.for_each([&](const GroupElement& g, double p) {
      const int r = metric->norm(g);
      double& mx = pr.max_p[r];
      mx = std::max(mx, p);
      if (r <= radius) {
        auto [it, fresh] = pr.min_p_region.emplace(r, p);
        if (!fresh) it->second = std::min(it->second, p);
      }
    });
    // region points missing from the table count as lower-bound violations
    const auto census = ball_census(spec, static_cast<int>(radius));
    for (std::int64_t s : census) pr.region += static_cast<std::size_t>(s);
    std::size_t present = 0;
    table.for_each([&](const GroupElement& g, double) {
      if (metric->norm(g) <= radius) ++present;
    });
    pr.region_zero = static_cast<std::int64_t>(pr.region - present);

    HscPoint pt;
    pt.n = n;
    pt.p_identity = table.at(spec.identity());
    pt.support = table.support_size();
    pt.lost_mass = table.lost_mass();
    pt.lower_region = pr.region;
    double best = std::numeric_limits<double>::infinity();
    for (double cp : grid) {
      const double c = upper_c(pr, n, D, cp);
      if (c * cp < best) {
        best = c * cp;
        pt.c_upper = c;
        pt.cprime_upper = cp;
      }
    }
    best = std::numeric_limits<double>::infinity();
    for (double cp : grid) {
      const double c = std::max(upper_c(pr, n, D, cp), lower_c(pr, n, D, cp));
      if (c * cp < best) {
        best = c * cp;
        pt.c_lower = c;
        pt.cprime_lower = cp;
      }
    }
    rep.points.push_back(pt);
    profiles.push_back(std::move(pr));
    kept.push_back(table);
  }

  double best = std::numeric_limits<double>::infinity();
  for (double cp : grid) {
    double c = 0;
    for (std::size_t i = 0; i < n_list.size(); ++i) c = std::max(c, upper_c(profiles[i], n_list[i], D, cp));
    if (c * cp < best) {
      best = c * cp;
      rep.c_upper = c;
      rep.cprime_upper = cp;
    }
  }
  best = std::numeric_limits<double>::infinity();
  for (double cp : grid) {
    double c = 0;
    for (std::size_t i = 0; i < n_list.size(); ++i)
      c = std::max({c, upper_c(profiles[i], n_list[i], D, cp), lower_c(profiles[i], n_list[i], D, cp)});
    if (c * cp < best) {
      best = c * cp;
      rep.c_lower = c;
      rep.cprime_lower = cp;
    }
  }

  // direct recount of every stored entry against the fitted pairs
  constexpr double slack = 1 + 1e-12;
  auto count = [&](const ProbabilityTable& t, int n, double cu, double cpu, double cl, double cpl,
                   std::int64_t& up, std::int64_t& lo) {
    const double radius = n / c_double_prime;
    t.for_each([&](const GroupElement& g, double p) {
      const double r = metric->norm(g);
      if (p > slack * cu * std::pow(n, -D / 2.0) * std::exp(-r * r / (cpu * n))) ++up;
      if (r <= radius && p * slack < std::pow(cl * n, -D / 2.0) * std::exp(-cpl * r * r / n)) ++lo;
    });
  };
  Curve decay;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    auto& pt = rep.points[i];
    count(kept[i], pt.n, pt.c_upper, pt.cprime_upper, pt.c_lower, pt.cprime_lower, pt.upper_violations,
          pt.lower_violations);
    pt.lower_violations += profiles[i].region_zero;
    count(kept[i], pt.n, rep.c_upper, rep.cprime_upper, rep.c_lower, rep.cprime_lower, rep.upper_violations,
          rep.lower_violations);
    rep.lower_violations += profiles[i].region_zero;
    if (pt.p_identity > 0) decay.add(pt.n, pt.p_identity, 0.0, 0);
  }
  if (decay.points.size() >= 3) rep.decay = exponent_fit(decay);
  return rep;
}

}  // namespace dehn
