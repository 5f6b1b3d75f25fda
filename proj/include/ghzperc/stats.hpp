#pragma once

#include <cstdint>
#include <span>

namespace ghzperc::stats {

struct Interval {
  double low;
  double high;
};

/// Wilson score interval for `successes` out of `trials` at normal quantile z.
Interval wilson(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

/// Two-sided normal quantile for confidence `level` (e.g. 0.95 -> 1.96).
double normal_quantile_two_sided(double level);

/// Two-sided p-value of a standard-normal statistic.
double normal_two_sided_p(double z);

/// P(X >= m) for X ~ Binomial(n, p).
double binomial_upper_tail(std::uint64_t n, std::uint64_t m, double p);

/// Exact integer accumulator for per-trial counts; merging is order
/// independent so parallel reductions are reproducible.
struct CountAccumulator {
  std::uint64_t trials = 0;
  std::uint64_t sum = 0;
  std::uint64_t sum_squares = 0;

  void add(std::uint64_t x) noexcept {
    ++trials;
    sum += x;
    sum_squares += x * x;
  }
  void merge(const CountAccumulator& other) noexcept {
    trials += other.trials;
    sum += other.sum;
    sum_squares += other.sum_squares;
  }
  double mean() const noexcept;
  /// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 trials.
  double stddev() const noexcept;
  double stderr_of_mean() const noexcept;
};

/// Weighted least-squares line through (x_i, y_i) with standard errors
/// sigma_i. Points with sigma 0 get weight from the smallest positive sigma.
struct LineFit {
  double intercept = 0;
  double slope = 0;
  double slope_stderr = 0;
  /// slope / slope_stderr; 0 when both are 0.
  double z() const noexcept;
};

LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> sigma);

}  // namespace ghzperc::stats
