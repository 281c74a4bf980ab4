#include "llab/core/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace llab {

double mean(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double variance_pop(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double m = mean(v);
    double s = 0.0;
    for (double x : v) {
        double d = x - m;
        s += d * d;
    }
    return s / static_cast<double>(v.size());
}

double stddev_pop(std::span<const double> v) { return std::sqrt(variance_pop(v)); }

double min_of(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("min_of: empty");
    return *std::min_element(v.begin(), v.end());
}

double max_of(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("max_of: empty");
    return *std::max_element(v.begin(), v.end());
}

double quantile(std::vector<double> v, double p) {
    if (v.empty()) throw std::invalid_argument("quantile: empty");
    if (p <= 0.0) return min_of(v);
    if (p >= 1.0) return max_of(v);
    std::sort(v.begin(), v.end());
    double idx = p * static_cast<double>(v.size() - 1);
    std::size_t lo = static_cast<std::size_t>(idx);
    std::size_t hi = std::min(lo + 1, v.size() - 1);
    double w = idx - static_cast<double>(lo);
    return (1.0 - w) * v[lo] + w * v[hi];
}

double covariance_pop(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("covariance_pop: length mismatch");
    if (x.empty()) return 0.0;
    double mx = mean(x), my = mean(y);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
    return s / static_cast<double>(x.size());
}

Describe describe(std::span<const double> v) {
    Describe d;
    d.count = v.size();
    if (v.empty()) return d;
    std::vector<double> copy(v.begin(), v.end());
    d.mean = mean(v);
    d.std = stddev_pop(v);
    d.min = min_of(v);
    d.max = max_of(v);
    d.q25 = quantile(copy, 0.25);
    d.median = quantile(copy, 0.50);
    d.q75 = quantile(copy, 0.75);
    return d;
}

}  // namespace llab
