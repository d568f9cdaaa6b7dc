#include "rmq/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>

#include "rmq/error.hpp"

namespace rmq::stats {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) {
    return 1.0;
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) {
      break;
    }
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) {
    raise(ErrorKind::InvalidArgument, "KS test needs at least one sample");
  }
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

TestResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(samples.size());
  const double d = ks_distance(std::move(samples), cdf);
  const double root = std::sqrt(n);
  return {d, kolmogorov_q((root + 0.12 + 0.11 / root) * d)};
}

TestResult ks_test_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    raise(ErrorKind::InvalidArgument, "two-sample KS test needs non-empty samples");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

double chi_square_sf(double statistic, double dof) {
  if (!(dof > 0.0)) {
    raise(ErrorKind::InvalidArgument, "chi-square needs positive degrees of freedom");
  }
  if (statistic <= 0.0) {
    return 1.0;
  }
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), statistic));
}

TestResult chi_square_gof(std::span<const std::size_t> counts, std::span<const double> weights) {
  if (counts.size() != weights.size() || counts.empty()) {
    raise(ErrorKind::InvalidArgument, "counts and weights must have equal, non-zero length");
  }
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  if (total == 0.0) {
    return {0.0, 1.0};
  }
  double stat = 0.0;
  int categories = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = weights[i] * total;
    if (expected <= 0.0) {
      if (counts[i] > 0) {
        return {std::numeric_limits<double>::infinity(), 0.0};
      }
      continue;
    }
    const double diff = static_cast<double>(counts[i]) - expected;
    stat += diff * diff / expected;
    ++categories;
  }
  if (categories < 2) {
    return {0.0, 1.0};
  }
  return {stat, chi_square_sf(stat, categories - 1)};
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    raise(ErrorKind::InvalidArgument, "linear fit needs two or more paired points");
  }
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) {
    raise(ErrorKind::InvalidArgument, "linear fit needs distinct x values");
  }
  const double slope = sxy / sxx;
  const double r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return {slope, my - slope * mx, r2};
}

double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) {
    return 0.0;
  }
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

}  // namespace rmq::stats
