#include "tvhc/stats.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace tvhc::stats {

double mean(std::span<const double> x) {
    if (x.empty()) {
        throw std::invalid_argument("mean of empty sample");
    }
    // Kahan summation; sample sizes reach 1e7.
    double sum = 0.0;
    double comp = 0.0;
    for (double v : x) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
    if (x.size() < 2) {
        return 0.0;
    }
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) {
        ss += (v - m) * (v - m);
    }
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double std_error(std::span<const double> x) {
    if (x.empty()) {
        throw std::invalid_argument("std_error of empty sample");
    }
    return stddev(x) / std::sqrt(static_cast<double>(x.size()));
}

double batch_means_std_error(std::span<const double> x, std::size_t batches) {
    if (batches < 2 || x.size() < 2 * batches) {
        throw std::invalid_argument("batch_means_std_error: not enough data for the requested batches");
    }
    const std::size_t width = x.size() / batches;
    std::vector<double> means(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        means[b] = mean(x.subspan(b * width, width));
    }
    return std_error(means);
}

double binomial_std_error(double p, std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("binomial_std_error with n = 0");
    }
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace tvhc::stats
