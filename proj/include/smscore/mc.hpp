#pragma once

#include <algorithm>
#include <atomic>
#include <compare>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "smscore/dataset.hpp"
#include "smscore/estimate.hpp"
#include "smscore/loss.hpp"
#include "smscore/stats.hpp"

namespace smscore {

enum class Method { MaxScore, Logistic, Huber, Probit };

// "maxscore", "logistic", "huber", "probit".
Method parse_method(const std::string& name);
std::string method_name(Method method);
// Loss with the default scale for surrogate methods; empty for MaxScore.
std::optional<LossSpec> surrogate_loss(Method method);

inline FitOptions unit_circle() {
    FitOptions opts;
    opts.domain = FitDomain::Circle;
    opts.radius = 1.0;
    return opts;
}

struct McConfig {
    std::vector<XDist> designs{XDist::Normal, XDist::T5, XDist::Laplace};
    std::vector<Method> methods{Method::MaxScore, Method::Logistic, Method::Huber, Method::Probit};
    std::vector<int> sample_sizes{250, 1000};
    int reps = 10000;
    int boot_S = 399;  // 0 skips the bootstrap
    double level = 0.95;
    std::uint64_t master_seed = 0;
    int workers = 1;
    // theta is estimated on the unit circle b(theta) = (cos theta, sin theta).
    FitOptions fit = unit_circle();
};

void validate(const McConfig& config);

struct CellKey {
    XDist design;
    Method method;
    int n;
    auto operator<=>(const CellKey&) const = default;
};

struct DesignMethod {
    XDist design;
    Method method;
    auto operator<=>(const DesignMethod&) const = default;
};

struct DesignSize {
    XDist design;
    int n;
    auto operator<=>(const DesignSize&) const = default;
};

struct DistributionCell {
    double mean = 0.0;
    double sd = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double qq_correlation = 0.0;
    stats::QqPairs qq;
    stats::DensityCurve density;
};

struct McReport {
    McConfig config;
    std::map<CellKey, double> rmse;
    std::map<DesignMethod, double> rmse_ratio;  // RMSE(largest n) / RMSE(smallest n)
    std::map<CellKey, double> coverage_analytic;
    std::map<CellKey, double> coverage_boot;
    std::map<CellKey, std::vector<double>> theta_draws;
    // n * se(theta)^2 from the analytic sandwich, one per replication.
    std::map<CellKey, std::vector<double>> variance_draws;
    std::map<CellKey, DistributionCell> distribution;
    std::map<DesignSize, int> redraws;
    long long boot_rejections = 0;
    double wall_seconds = 0.0;
};

// Replication r of (design, n) uses dataset seed mix_seed({master, design, n, r, attempt});
// a replication where any method fails is redrawn with attempt + 1. More than
// 1% redraws in a (design, n) group aborts the experiment.
std::uint64_t replication_seed(std::uint64_t master, XDist design, int n, int rep, int attempt);

// theta_hat draws and RMSE around pi/4 for every cell, plus ratios.
McReport run_rmse(const McConfig& config);
// Adds analytic (and, when boot_S > 0, studentized bootstrap) coverage of pi/4.
McReport run_coverage(const McConfig& config);
// theta_hat draws with normal reference, QQ pairs and moment checks per cell.
McReport run_distribution(const McConfig& config);
// Fills report.distribution from report.theta_draws (cells with at least 4 draws).
void add_distribution(McReport& report);

std::string format_table1(const McReport& report);
std::string format_table2(const McReport& report);
// Long-format CSV "design,method,n,series,x,y" with series qq, kde and normal_pdf.
void write_figures_csv(const McReport& report, std::ostream& out);

// Calls fn(i) for i in [0, count) on up to `workers` threads. Exceptions are
// rethrown after all threads join, lowest index first.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    const auto threads = static_cast<std::size_t>(std::max(1, workers));
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads == 1 || count <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(std::min(threads, count));
        for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(work);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace smscore
