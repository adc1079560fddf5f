#pragma once

#include <cstdint>
#include <span>

namespace dtseq::stats {

/// Percentile `q` in [0,100] by linear interpolation between order
/// statistics: position q/100 * (n-1) over the sorted values.
double percentile(std::span<const double> values, double q);

/// P(X >= k) for X ~ Binomial(n, p).
double binomial_upper_tail(std::int64_t k, std::int64_t n, double p);

/// Two-sided p-value of a standard normal statistic.
double normal_two_sided_p(double z);

double mean(std::span<const double> values);

}  // namespace dtseq::stats
