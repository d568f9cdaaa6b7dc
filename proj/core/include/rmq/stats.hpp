#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rmq::stats {

double normal_cdf(double x);

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

struct TestResult {
  double statistic;
  double p_value;
};

/// Sup-distance between the empirical CDF of `samples` and `cdf`.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

/// One-sample KS test (Stephens' finite-n correction).
TestResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Two-sample KS test.
TestResult ks_test_two_sample(std::vector<double> a, std::vector<double> b);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double statistic, double dof);

/// Pearson goodness-of-fit of `counts` against probabilities `weights`.
/// Categories with zero weight contribute no degree of freedom; an observed
/// count in such a category yields p = 0.
TestResult chi_square_gof(std::span<const std::size_t> counts, std::span<const double> weights);

struct LinearFit {
  double slope;
  double intercept;
  double r_squared;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);

}  // namespace rmq::stats
