#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gaf {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct NormalityMetrics {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks_statistic = 0.0;  // vs N(0,1) after self-standardisation
};

double standard_normal_cdf(double x);

/// Asymptotic Kolmogorov critical value at the 1% level: 1.628 / sqrt(N).
double ks_critical_1pct(std::size_t n);

/// One-sample KS statistic of already standardised data against N(0,1).
double ks_statistic_normal(std::span<const double> standardized);

/// Two-sample KS statistic.
double ks_statistic_two_sample(std::span<const double> a, std::span<const double> b);

/// Needs at least 100 samples and positive variance.
NormalityMetrics normality_metrics(std::span<const double> samples);

/// FNV-1a over the bytes of the sorted sample vector; independent of the
/// order in which samples were produced.
std::uint64_t sorted_checksum(std::span<const double> samples);

}  // namespace gaf
