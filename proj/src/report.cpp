#include "smscore/report.hpp"

#include <string>

namespace smscore {

namespace {

using nlohmann::json;

json vector_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.begin(), v.end())); }

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const Eigen::VectorXd row = m.row(i).transpose();
        rows.push_back(vector_json(row));
    }
    return rows;
}

}  // namespace

json to_json(const FitResult& fit) {
    json j;
    j["b_hat"] = vector_json(fit.b_hat);
    j["objective"] = fit.objective;
    j["grad_norm"] = fit.grad_norm;
    j["iterations"] = fit.iterations;
    j["on_boundary"] = fit.on_boundary;
    j["theta_hat"] = fit.theta_hat ? json(*fit.theta_hat) : json(nullptr);
    j["direction"] = vector_json(fit.direction);
    j["warnings"] = fit.warnings;
    return j;
}

json to_json(const CiReport& ci) {
    json j;
    j["estimate"] = ci.estimate;
    j["se"] = ci.se;
    j["lo"] = ci.lo;
    j["hi"] = ci.hi;
    j["level"] = ci.level;
    j["method"] = ci.method == CiMethod::NormalAnalytic ? "normal_analytic" : "studentized_bootstrap";
    if (ci.boot_draws) j["boot_draws"] = *ci.boot_draws;
    if (ci.boot_rejections) j["boot_rejections"] = *ci.boot_rejections;
    return j;
}

json to_json(const SandwichEstimate& sw) {
    return {{"H_hat", matrix_json(sw.H_hat)},
            {"Omega_hat", matrix_json(sw.Omega_hat)},
            {"V_hat", matrix_json(sw.V_hat)},
            {"condition_number", sw.condition_number},
            {"domain", fit_domain_name(sw.domain)}};
}

json to_json(const MaxScoreFit& fit) {
    return {{"theta_hat", fit.theta_hat},
            {"score", fit.score},
            {"argmax_interval", {fit.argmax_interval.first, fit.argmax_interval.second}}};
}

json to_json(const McConfig& config) {
    json designs = json::array();
    for (XDist d : config.designs) designs.push_back(xdist_name(d));
    json methods = json::array();
    for (Method m : config.methods) methods.push_back(method_name(m));
    return {{"designs", designs},
            {"methods", methods},
            {"sample_sizes", config.sample_sizes},
            {"reps", config.reps},
            {"boot_S", config.boot_S},
            {"level", config.level},
            {"seed", config.master_seed},
            {"domain", fit_domain_name(config.fit.domain)},
            {"radius", config.fit.radius},
            {"grad_tol", config.fit.grad_tol}};
}

json to_json(const McReport& report, bool include_draws) {
    json cells = json::array();
    for (const auto& [key, rmse] : report.rmse) {
        json c;
        c["design"] = xdist_name(key.design);
        c["method"] = method_name(key.method);
        c["n"] = key.n;
        c["rmse"] = rmse;
        if (auto it = report.coverage_analytic.find(key); it != report.coverage_analytic.end())
            c["coverage_analytic"] = it->second;
        if (auto it = report.coverage_boot.find(key); it != report.coverage_boot.end())
            c["coverage_boot"] = it->second;
        if (auto it = report.distribution.find(key); it != report.distribution.end()) {
            const auto& d = it->second;
            c["distribution"] = {{"mean", d.mean},
                                 {"sd", d.sd},
                                 {"skewness", d.skewness},
                                 {"excess_kurtosis", d.excess_kurtosis},
                                 {"qq_correlation", d.qq_correlation}};
        }
        if (include_draws) {
            if (auto it = report.theta_draws.find(key); it != report.theta_draws.end())
                c["theta_draws"] = it->second;
        }
        cells.push_back(std::move(c));
    }
    json ratios = json::array();
    for (const auto& [key, ratio] : report.rmse_ratio)
        ratios.push_back({{"design", xdist_name(key.design)}, {"method", method_name(key.method)}, {"ratio", ratio}});
    json redraws = json::array();
    for (const auto& [key, count] : report.redraws)
        redraws.push_back({{"design", xdist_name(key.design)}, {"n", key.n}, {"redraws", count}});

    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["config"] = to_json(report.config);
    j["cells"] = std::move(cells);
    j["rmse_ratio"] = std::move(ratios);
    j["redraws"] = std::move(redraws);
    j["boot_rejections"] = report.boot_rejections;
    return j;
}

}  // namespace smscore
