#include "smscore/mc.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "smscore/baseline.hpp"
#include "smscore/dgp.hpp"
#include "smscore/error.hpp"
#include "smscore/infer.hpp"
#include "smscore/rng.hpp"

namespace smscore {

Method parse_method(const std::string& name) {
    if (name == "maxscore") return Method::MaxScore;
    if (name == "logistic") return Method::Logistic;
    if (name == "huber") return Method::Huber;
    if (name == "probit") return Method::Probit;
    throw ConfigError("mc", "unknown method '" + name + "'; supported: maxscore, logistic, huber, probit");
}

std::string method_name(Method method) {
    switch (method) {
        case Method::MaxScore: return "maxscore";
        case Method::Logistic: return "logistic";
        case Method::Huber: return "huber";
        case Method::Probit: return "probit";
    }
    return "?";
}

std::optional<LossSpec> surrogate_loss(Method method) {
    switch (method) {
        case Method::MaxScore: return std::nullopt;
        case Method::Logistic: return LossSpec::logistic();
        case Method::Huber: return LossSpec::huber();
        case Method::Probit: return LossSpec::probit();
    }
    return std::nullopt;
}

void validate(const McConfig& config) {
    if (config.reps < 1) throw ConfigError("mc", "reps must be at least 1");
    if (config.sample_sizes.empty()) throw ConfigError("mc", "no sample sizes given");
    for (int n : config.sample_sizes)
        if (n < 3) throw ConfigError("mc", "sample sizes must be at least 3");
    if (config.designs.empty()) throw ConfigError("mc", "no designs given");
    if (config.methods.empty()) throw ConfigError("mc", "no methods given");
    if (!(config.level > 0.0 && config.level < 1.0)) throw ConfigError("mc", "level must lie in (0, 1)");
    if (config.boot_S != 0 && config.boot_S < 99)
        throw ConfigError("mc", "boot_S must be 0 (disabled) or at least 99");
    if (config.workers < 1) throw ConfigError("mc", "workers must be at least 1");
}

std::uint64_t replication_seed(std::uint64_t master, XDist design, int n, int rep, int attempt) {
    return mix_seed({master, static_cast<std::uint64_t>(design), static_cast<std::uint64_t>(n),
                     static_cast<std::uint64_t>(rep), static_cast<std::uint64_t>(attempt)});
}

namespace {

enum class Mode { Rmse, Coverage };

constexpr double kTheta0 = std::numbers::pi / 4.0;
constexpr int kMaxAttempts = 1000;

struct MethodOutcome {
    double theta = 0.0;  // theta0 + wrapped error
    double variance = 0.0;
    bool covered_analytic = false;
    bool covered_boot = false;
};

struct RepOutcome {
    std::vector<MethodOutcome> methods;
    int redraws = 0;
    int boot_rejections = 0;
};

bool covers(const CiReport& ci, double truth) {
    // Compare on the estimate's branch of the angle.
    const double shifted = ci.estimate + wrap_angle(truth - ci.estimate);
    return ci.lo <= shifted && shifted <= ci.hi;
}

// One replication attempt; returns false when any method fails on this dataset.
bool attempt_replication(const McConfig& config, Mode mode, const Dataset& data,
                         std::uint64_t seed, RepOutcome& out) {
    out.methods.assign(config.methods.size(), MethodOutcome{});
    int rejections = 0;
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
        const Method method = config.methods[m];
        MethodOutcome& res = out.methods[m];
        try {
            const auto loss = surrogate_loss(method);
            if (!loss) {
                res.theta = kTheta0 + wrap_angle(fit_maxscore_2d(data).theta_hat - kTheta0);
                continue;
            }
            const FitResult fr = fit(data, *loss, config.fit);
            if (fr.on_boundary || !fr.theta_hat) return false;
            res.theta = kTheta0 + wrap_angle(*fr.theta_hat - kTheta0);
            if (mode == Mode::Rmse) continue;

            const SandwichEstimate sw = sandwich(data, *loss, fr.b_hat, config.fit.domain);
            const CiReport analytic = ci_normal(fr, sw, AngleTarget{}, config.level);
            res.variance = static_cast<double>(data.n()) * analytic.se * analytic.se;
            res.covered_analytic = covers(analytic, kTheta0);
            if (config.boot_S > 0) {
                BootstrapOptions boot;
                boot.draws = config.boot_S;
                boot.level = config.level;
                boot.seed = mix_seed({seed, 0xb0075747ULL, static_cast<std::uint64_t>(method)});
                const BootstrapResult br =
                    bootstrap_studentized(data, *loss, config.fit, AngleTarget{}, boot, fr, sw);
                res.covered_boot = covers(br.ci, kTheta0);
                rejections += br.ci.boot_rejections.value_or(0);
            }
        } catch (const Error&) {
            return false;
        }
    }
    out.boot_rejections = rejections;
    return true;
}

McReport run(const McConfig& config, Mode mode) {
    validate(config);
    const auto start = std::chrono::steady_clock::now();
    McReport report;
    report.config = config;

    for (XDist xdist : config.designs) {
        const SimDesign design = SimDesign::of(xdist);
        for (int n : config.sample_sizes) {
            std::vector<RepOutcome> outcomes(static_cast<std::size_t>(config.reps));
            parallel_for(outcomes.size(), config.workers, [&](std::size_t r) {
                RepOutcome& out = outcomes[r];
                for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
                    const std::uint64_t seed =
                        replication_seed(config.master_seed, xdist, n, static_cast<int>(r), attempt);
                    const Dataset data = gen_dataset(design, n, seed);
                    bool ok = false;
                    try {
                        validate_for_estimation(data);
                        ok = attempt_replication(config, mode, data, seed, out);
                    } catch (const Error&) {
                        ok = false;
                    }
                    if (ok) {
                        out.redraws = attempt;
                        return;
                    }
                }
                throw ExperimentError("mc", "replication " + std::to_string(r) + " failed " +
                                                std::to_string(kMaxAttempts) + " times");
            });

            int redraws = 0;
            for (const auto& o : outcomes) {
                redraws += o.redraws;
                report.boot_rejections += o.boot_rejections;
            }
            report.redraws[{xdist, n}] = redraws;
            if (redraws > 0.01 * config.reps)
                throw ExperimentError("mc", std::to_string(redraws) + " of " + std::to_string(config.reps) +
                                                " replications redrawn for design " + xdist_name(xdist) +
                                                ", n = " + std::to_string(n));

            for (std::size_t m = 0; m < config.methods.size(); ++m) {
                const Method method = config.methods[m];
                const CellKey key{xdist, method, n};
                std::vector<double> thetas;
                thetas.reserve(outcomes.size());
                double sq = 0.0;
                for (const auto& o : outcomes) {
                    thetas.push_back(o.methods[m].theta);
                    const double err = o.methods[m].theta - kTheta0;
                    sq += err * err;
                }
                report.rmse[key] = std::sqrt(sq / static_cast<double>(outcomes.size()));
                report.theta_draws[key] = std::move(thetas);

                if (mode == Mode::Coverage && surrogate_loss(method)) {
                    std::vector<double> variances;
                    variances.reserve(outcomes.size());
                    int hits = 0;
                    int boot_hits = 0;
                    for (const auto& o : outcomes) {
                        variances.push_back(o.methods[m].variance);
                        hits += o.methods[m].covered_analytic ? 1 : 0;
                        boot_hits += o.methods[m].covered_boot ? 1 : 0;
                    }
                    const auto reps = static_cast<double>(outcomes.size());
                    report.coverage_analytic[key] = hits / reps;
                    if (config.boot_S > 0) report.coverage_boot[key] = boot_hits / reps;
                    report.variance_draws[key] = std::move(variances);
                }
            }
        }
    }

    if (config.sample_sizes.size() >= 2) {
        const auto [lo_it, hi_it] =
            std::minmax_element(config.sample_sizes.begin(), config.sample_sizes.end());
        for (XDist xdist : config.designs)
            for (Method method : config.methods) {
                const double small = report.rmse.at({xdist, method, *lo_it});
                const double large = report.rmse.at({xdist, method, *hi_it});
                report.rmse_ratio[{xdist, method}] = large / small;
            }
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace

McReport run_rmse(const McConfig& config) { return run(config, Mode::Rmse); }

McReport run_coverage(const McConfig& config) { return run(config, Mode::Coverage); }

void add_distribution(McReport& report) {
    for (const auto& [key, draws] : report.theta_draws) {
        if (draws.size() < 4) continue;
        DistributionCell cell;
        cell.mean = stats::mean(draws);
        cell.sd = std::sqrt(stats::variance(draws));
        cell.skewness = stats::skewness(draws);
        cell.excess_kurtosis = stats::excess_kurtosis(draws);
        cell.qq = stats::qq_pairs(draws);
        cell.qq_correlation = stats::correlation(cell.qq.empirical, cell.qq.normal);
        cell.density = stats::density_curve(draws);
        report.distribution[key] = std::move(cell);
    }
}

McReport run_distribution(const McConfig& config) {
    McReport report = run(config, Mode::Rmse);
    add_distribution(report);
    return report;
}

namespace {

std::string design_label(XDist xdist) {
    switch (xdist) {
        case XDist::Normal: return "(i) Normal";
        case XDist::T5: return "(ii) t5";
        case XDist::Laplace: return "(iii) Laplace";
    }
    return "?";
}

std::string method_label(Method method) {
    switch (method) {
        case Method::MaxScore: return "(0) Conventional Maximum Score";
        case Method::Logistic: return "(1) Surrogate Logistic";
        case Method::Huber: return "(2) Surrogate Huber";
        case Method::Probit: return "(3) Surrogate Probit";
    }
    return "?";
}

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string lpad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string format_table1(const McReport& report) {
    const auto& sizes = report.config.sample_sizes;
    std::ostringstream out;
    std::string header = pad("X", 16) + pad("Estimation Method", 34);
    for (int n : sizes) header += lpad("RMSE(" + std::to_string(n) + ")", 12);
    if (sizes.size() >= 2) header += lpad("Ratio", 10);
    const std::string rule(header.size(), '-');
    out << "Evidence of the Root-n Consistency (" << report.config.reps << " replications)\n";
    out << rule << '\n' << header << '\n' << rule << '\n';
    for (XDist xdist : report.config.designs) {
        bool first = true;
        for (Method method : report.config.methods) {
            std::string line = pad(first ? design_label(xdist) : "", 16) + pad(method_label(method), 34);
            for (int n : sizes) line += lpad(fixed3(report.rmse.at({xdist, method, n})), 12);
            if (auto it = report.rmse_ratio.find({xdist, method}); it != report.rmse_ratio.end())
                line += lpad(fixed3(it->second), 10);
            out << line << '\n';
            first = false;
        }
        out << rule << '\n';
    }
    return out.str();
}

std::string format_table2(const McReport& report) {
    const auto& sizes = report.config.sample_sizes;
    const bool boot = report.config.boot_S > 0;
    std::ostringstream out;
    std::string header = pad("X", 16) + pad("Estimation Method", 26);
    for (int n : sizes) header += lpad("A n=" + std::to_string(n), 10);
    if (boot)
        for (int n : sizes) header += lpad("B n=" + std::to_string(n), 10);
    const std::string rule(header.size(), '-');
    out << "Coverage of " << fixed3(report.config.level) << " confidence intervals: (A) analytic";
    if (boot) out << ", (B) studentized bootstrap with S = " << report.config.boot_S;
    out << " (" << report.config.reps << " replications)\n";
    out << rule << '\n' << header << '\n' << rule << '\n';
    for (XDist xdist : report.config.designs) {
        bool first = true;
        for (Method method : report.config.methods) {
            if (!surrogate_loss(method)) continue;
            std::string line = pad(first ? design_label(xdist) : "", 16) +
                               pad(method_label(method).substr(0, 26), 26);
            for (int n : sizes) line += lpad(fixed3(report.coverage_analytic.at({xdist, method, n})), 10);
            if (boot)
                for (int n : sizes) line += lpad(fixed3(report.coverage_boot.at({xdist, method, n})), 10);
            out << line << '\n';
            first = false;
        }
        out << rule << '\n';
    }
    return out.str();
}

void write_figures_csv(const McReport& report, std::ostream& out) {
    out << "design,method,n,series,x,y\n";
    out.precision(17);
    for (const auto& [key, cell] : report.distribution) {
        const std::string prefix =
            xdist_name(key.design) + ',' + method_name(key.method) + ',' + std::to_string(key.n) + ',';
        for (std::size_t i = 0; i < cell.qq.empirical.size(); ++i)
            out << prefix << "qq," << cell.qq.normal[i] << ',' << cell.qq.empirical[i] << '\n';
        for (std::size_t i = 0; i < cell.density.grid.size(); ++i)
            out << prefix << "kde," << cell.density.grid[i] << ',' << cell.density.kernel[i] << '\n';
        for (std::size_t i = 0; i < cell.density.grid.size(); ++i)
            out << prefix << "normal_pdf," << cell.density.grid[i] << ','
                << cell.density.normal_reference[i] << '\n';
    }
}

}  // namespace smscore
