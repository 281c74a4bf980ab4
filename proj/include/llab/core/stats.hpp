// stats.hpp - small descriptive-statistics helpers shared across modules.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace llab {

double mean(std::span<const double> v);

// Population variance (divide by n).
double variance_pop(std::span<const double> v);
double stddev_pop(std::span<const double> v);

double min_of(std::span<const double> v);
double max_of(std::span<const double> v);

// Empirical quantile with linear interpolation between order statistics
// (index = p * (n - 1)). p in [0, 1].
double quantile(std::vector<double> v, double p);

// Population covariance between two equal-length series.
double covariance_pop(std::span<const double> x, std::span<const double> y);

struct Describe {
    std::size_t count = 0;
    double mean = 0, std = 0, min = 0, q25 = 0, median = 0, q75 = 0, max = 0;
};

Describe describe(std::span<const double> v);

}  // namespace llab
