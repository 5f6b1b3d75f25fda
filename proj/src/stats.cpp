#include "ghzperc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>

namespace ghzperc::stats {

Interval wilson(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (phat + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / denom;
  return {std::max(0.0, std::min(phat, centre - half)), std::min(1.0, std::max(phat, centre + half))};
}

double normal_quantile_two_sided(double level) {
  boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, 0.5 + level / 2);
}

double normal_two_sided_p(double z) {
  boost::math::normal_distribution<double> standard;
  return 2 * boost::math::cdf(boost::math::complement(standard, std::abs(z)));
}

double binomial_upper_tail(std::uint64_t n, std::uint64_t m, double p) {
  if (m == 0) return 1.0;
  if (m > n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  boost::math::binomial_distribution<double> dist(static_cast<double>(n), p);
  // P(X >= m) = 1 - P(X <= m - 1)
  return boost::math::cdf(boost::math::complement(dist, static_cast<double>(m - 1)));
}

double CountAccumulator::mean() const noexcept {
  return trials == 0 ? 0.0 : static_cast<double>(sum) / static_cast<double>(trials);
}

double CountAccumulator::stddev() const noexcept {
  if (trials < 2) return 0.0;
  const double n = static_cast<double>(trials);
  const double m = mean();
  const double var = (static_cast<double>(sum_squares) - n * m * m) / (n - 1);
  return var > 0 ? std::sqrt(var) : 0.0;
}

double CountAccumulator::stderr_of_mean() const noexcept {
  return trials == 0 ? 0.0 : stddev() / std::sqrt(static_cast<double>(trials));
}

double LineFit::z() const noexcept {
  if (slope_stderr > 0) return slope / slope_stderr;
  if (slope == 0) return 0.0;
  return slope > 0 ? std::numeric_limits<double>::infinity()
                   : -std::numeric_limits<double>::infinity();
}

LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> sigma) {
  const std::size_t n = x.size();
  double floor_sigma = std::numeric_limits<double>::infinity();
  for (double s : sigma)
    if (s > 0) floor_sigma = std::min(floor_sigma, s);
  const bool all_exact = std::isinf(floor_sigma);

  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = all_exact ? 1.0 : std::max(sigma[i], floor_sigma);
    w[i] = 1.0 / (s * s);
  }
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double xbar = sx / sw;
  const double ybar = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  LineFit fit;
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = ybar - fit.slope * xbar;
  fit.slope_stderr = all_exact || sxx <= 0 ? 0.0 : std::sqrt(1.0 / sxx);
  return fit;
}

}  // namespace ghzperc::stats
