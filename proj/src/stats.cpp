#include "gaf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "gaf/errors.hpp"

namespace gaf {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

double ks_statistic_normal(std::span<const double> standardized) {
  std::vector<double> s(standardized.begin(), standardized.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = standard_normal_cdf(s[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double ks_statistic_two_sample(std::span<const double> a, std::span<const double> b) {
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(double(i) / x.size() - double(j) / y.size()));
  }
  return d;
}

NormalityMetrics normality_metrics(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 100) {
    throw InsufficientDataError("normality metrics need at least 100 samples, got " +
                                std::to_string(n));
  }
  CompensatedSum s1;
  for (double x : samples) s1.add(x);
  const double mean = s1.value() / n;
  CompensatedSum s2, s3, s4;
  for (double x : samples) {
    const double d = x - mean;
    s2.add(d * d);
    s3.add(d * d * d);
    s4.add(d * d * d * d);
  }
  const double m2 = s2.value() / n;
  if (!(m2 > 0.0)) throw InsufficientDataError("normality metrics: zero variance");
  const double m3 = s3.value() / n;
  const double m4 = s4.value() / n;
  const double nn = static_cast<double>(n);

  NormalityMetrics out;
  out.mean = mean;
  out.variance = s2.value() / (nn - 1.0);
  // Adjusted Fisher-Pearson skewness and the unbiased excess-kurtosis estimator.
  const double g1 = m3 / std::pow(m2, 1.5);
  out.skewness = std::sqrt(nn * (nn - 1.0)) / (nn - 2.0) * g1;
  const double g2 = m4 / (m2 * m2) - 3.0;
  out.excess_kurtosis = (nn - 1.0) / ((nn - 2.0) * (nn - 3.0)) * ((nn + 1.0) * g2 + 6.0);

  std::vector<double> z(samples.begin(), samples.end());
  const double sd = std::sqrt(out.variance);
  for (double& v : z) v = (v - mean) / sd;
  out.ks_statistic = ks_statistic_normal(z);
  return out;
}

std::uint64_t sorted_checksum(std::span<const double> samples) {
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  std::uint64_t h = 1469598103934665603ull;
  for (double v : s) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace gaf
