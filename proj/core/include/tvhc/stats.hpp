#pragma once

#include <cstddef>
#include <span>

namespace tvhc::stats {

double mean(std::span<const double> x);

/// Unbiased sample standard deviation; 0 for fewer than two values.
double stddev(std::span<const double> x);

/// stddev / sqrt(n).
double std_error(std::span<const double> x);

/// Standard error of the mean of a correlated sequence by non-overlapping
/// batch means. Trailing values that do not fill a batch are dropped.
double batch_means_std_error(std::span<const double> x, std::size_t batches = 20);

/// sqrt(p (1 - p) / n).
double binomial_std_error(double p, std::size_t n);

}  // namespace tvhc::stats
