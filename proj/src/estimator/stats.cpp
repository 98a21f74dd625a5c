#include "dehn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "dehn/error.hpp"

namespace dehn {

void Curve::add(double scale, double value, double stderr_, std::size_t samples) {
  if (!points.empty() && scale <= points.back().scale)
    throw DomainError("curve scales must be strictly increasing");
  points.push_back({scale, value, stderr_, samples});
}

ExponentFit exponent_fit(const Curve& curve) {
  std::vector<CurvePoint> pts = curve.points;
  ExponentFit fit;
  for (const auto& p : pts)
    if (!(p.value > 0) || !(p.scale > 0)) throw DomainError("exponent_fit needs positive scales and values");
  if (pts.size() >= 4 && pts.front().stderr_ / pts.front().value > 0.2) {
    pts.erase(pts.begin());
    fit.dropped_first = true;
  }
  if (pts.size() < 3) throw DomainError("exponent_fit needs at least 3 points");

  const bool exact = std::all_of(pts.begin(), pts.end(), [](const CurvePoint& p) { return p.stderr_ <= 0; });
  std::vector<double> x, y, w;
  for (const auto& p : pts) {
    x.push_back(std::log(p.scale));
    y.push_back(std::log(p.value));
    if (exact) {
      w.push_back(1.0);
    } else {
      const double rel = std::max(p.stderr_ / p.value, 1e-12);
      w.push_back(1.0 / (rel * rel));
    }
  }
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points_used = x.size();
  if (exact) {
    // residual-based standard error
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_stderr = x.size() > 2 ? std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx) : 0.0;
  } else {
    // weights are inverse variances of log(value)
    fit.slope_stderr = std::sqrt(1.0 / sxx);
  }
  return fit;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / static_cast<double>(values.size() - 1);
    s.stderr_ = std::sqrt(s.variance / static_cast<double>(values.size()));
  }
  return s;
}

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double q = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("KS test needs non-empty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  return {d, kolmogorov_q((sq + 0.12 + 0.11 / sq) * d)};
}

TestResult chi_square_gof(std::span<const std::int64_t> observed, std::span<const double> expected) {
  if (observed.size() != expected.size() || observed.size() < 2)
    throw DomainError("chi-square needs matching observed/expected with >= 2 cells");
  const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::int64_t{0}));
  const double norm = std::accumulate(expected.begin(), expected.end(), 0.0);
  double stat = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = total * expected[i] / norm;
    if (e <= 0) throw DomainError("chi-square expected count must be positive");
    const double diff = static_cast<double>(observed[i]) - e;
    stat += diff * diff / e;
  }
  boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
  return {stat, boost::math::cdf(boost::math::complement(dist, stat))};
}

}  // namespace dehn
