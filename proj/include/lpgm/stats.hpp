#pragma once

#include <functional>
#include <span>
#include <vector>

namespace lpgm::stats {

double normal_cdf(double x);

/// sup_x |F_n(x) - F(x)| for a sample (any order) against a continuous CDF.
double ks_distance(std::span<const double> sample, const std::function<double(double)>& cdf);

/// Kolmogorov distance between a weighted empirical CDF and a continuous
/// CDF. Weights need not be normalized.
double ks_distance_weighted(std::span<const double> sample, std::span<const double> weights,
                            const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Asymptotic critical value of the two-sample statistic at level alpha:
/// sqrt(-log(alpha/2)/2) * sqrt((n+m)/(n m)).
double ks_two_sample_critical(std::size_t n, std::size_t m, double alpha);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;
  double q05 = 0.0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  double q95 = 0.0;
};

/// Mean, sample standard deviation and linearly interpolated quantiles.
Summary summarize(std::span<const double> sample);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace lpgm::stats
