#pragma once

#include <span>
#include <vector>

namespace smscore::stats {

double mean(std::span<const double> x);
// Unbiased (n - 1) sample variance.
double variance(std::span<const double> x);
// Moment ratios m3 / m2^1.5 and m4 / m2^2 - 3 with population central moments.
double skewness(std::span<const double> x);
double excess_kurtosis(std::span<const double> x);
double correlation(std::span<const double> x, std::span<const double> y);

// Sorted draws against the matched normal quantiles mean + sd * z((i - 0.5)/n).
struct QqPairs {
    std::vector<double> empirical;
    std::vector<double> normal;
};

QqPairs qq_pairs(std::span<const double> x);
double qq_correlation(std::span<const double> x);

// Gaussian kernel density with Silverman's rule-of-thumb bandwidth on an even
// grid spanning mean +- 5 sd.
struct DensityCurve {
    std::vector<double> grid;
    std::vector<double> kernel;
    std::vector<double> normal_reference;  // N(mean, sd^2) density on the same grid
    double bandwidth = 0.0;
};

DensityCurve density_curve(std::span<const double> x, int points = 201);

// Trapezoid rule on an ordered grid.
double trapezoid(std::span<const double> grid, std::span<const double> values);

}  // namespace smscore::stats
