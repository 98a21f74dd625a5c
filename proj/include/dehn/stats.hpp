#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dehn {

struct CurvePoint {
  double scale = 0;
  double value = 0;
  double stderr_ = 0;
  std::size_t samples = 0;
};

/// Points with strictly increasing scale.
struct Curve {
  std::vector<CurvePoint> points;

  void add(double scale, double value, double stderr_, std::size_t samples);
};

/// Weighted least squares of log(value) on log(scale).
struct ExponentFit {
  double slope = 0;
  double intercept = 0;
  double slope_stderr = 0;
  std::size_t points_used = 0;
  bool dropped_first = false;
};

/// Weights are inverse squared relative stderr; exact points (stderr 0) get
/// equal weights. The smallest scale is dropped when its relative stderr
/// exceeds 20%. Throws DomainError on non-positive values or < 3 points.
ExponentFit exponent_fit(const Curve& curve);

struct Summary {
  double mean = 0;
  double stderr_ = 0;
  double variance = 0;
  std::size_t count = 0;
};

/// Two-pass mean/variance in index order; deterministic for a fixed input.
Summary summarize(std::span<const double> values);

struct TestResult {
  double statistic = 0;
  double p_value = 0;
};

/// Two-sample Kolmogorov-Smirnov with the asymptotic Kolmogorov distribution.
TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);
/// Q_KS(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

/// Pearson chi-square against expected probabilities (normalised internally).
TestResult chi_square_gof(std::span<const std::int64_t> observed, std::span<const double> expected);

}  // namespace dehn
