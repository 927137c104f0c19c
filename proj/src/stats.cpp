#include "smscore/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smscore/error.hpp"
#include "smscore/normal.hpp"

namespace smscore::stats {

namespace {

void require(std::span<const double> x, std::size_t min_size) {
    if (x.size() < min_size)
        throw InsufficientDataError("stats", "need at least " + std::to_string(min_size) + " values");
}

// Central moment of the given order around the sample mean.
double central_moment(std::span<const double> x, double mu, int order) {
    double s = 0.0;
    for (double v : x) s += std::pow(v - mu, order);
    return s / static_cast<double>(x.size());
}

}  // namespace

double mean(std::span<const double> x) {
    require(x, 1);
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    require(x, 2);
    const double mu = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - mu) * (v - mu);
    return s / static_cast<double>(x.size() - 1);
}

double skewness(std::span<const double> x) {
    require(x, 3);
    const double mu = mean(x);
    const double m2 = central_moment(x, mu, 2);
    return central_moment(x, mu, 3) / std::pow(m2, 1.5);
}

double excess_kurtosis(std::span<const double> x) {
    require(x, 4);
    const double mu = mean(x);
    const double m2 = central_moment(x, mu, 2);
    return central_moment(x, mu, 4) / (m2 * m2) - 3.0;
}

double correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ShapeError("stats", "correlation of unequal-length samples");
    require(x, 2);
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

QqPairs qq_pairs(std::span<const double> x) {
    require(x, 2);
    QqPairs out;
    out.empirical.assign(x.begin(), x.end());
    std::sort(out.empirical.begin(), out.empirical.end());
    const double mu = mean(x);
    const double sd = std::sqrt(variance(x));
    const auto n = static_cast<double>(x.size());
    out.normal.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out.normal[i] = mu + sd * normal::quantile((static_cast<double>(i) + 0.5) / n);
    return out;
}

double qq_correlation(std::span<const double> x) {
    const QqPairs qq = qq_pairs(x);
    return correlation(qq.empirical, qq.normal);
}

DensityCurve density_curve(std::span<const double> x, int points) {
    require(x, 2);
    if (points < 2) throw ConfigError("stats", "density grid needs at least two points");
    const double mu = mean(x);
    const double sd = std::sqrt(variance(x));
    DensityCurve out;
    out.bandwidth = 1.06 * sd * std::pow(static_cast<double>(x.size()), -0.2);
    out.grid.resize(static_cast<std::size_t>(points));
    out.kernel.assign(static_cast<std::size_t>(points), 0.0);
    out.normal_reference.resize(static_cast<std::size_t>(points));
    const double lo = mu - 5.0 * sd;
    const double step = 10.0 * sd / (points - 1);
    const double norm = 1.0 / (static_cast<double>(x.size()) * out.bandwidth);
    for (std::size_t g = 0; g < out.grid.size(); ++g) {
        const double at = lo + step * static_cast<double>(g);
        out.grid[g] = at;
        double s = 0.0;
        for (double v : x) s += normal::pdf((at - v) / out.bandwidth);
        out.kernel[g] = s * norm;
        out.normal_reference[g] = normal::pdf((at - mu) / sd) / sd;
    }
    return out;
}

double trapezoid(std::span<const double> grid, std::span<const double> values) {
    if (grid.size() != values.size()) throw ShapeError("stats", "grid and values differ in length");
    double s = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        s += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
    return s;
}

}  // namespace smscore::stats
