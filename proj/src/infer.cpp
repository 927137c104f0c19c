#include "smscore/infer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "smscore/error.hpp"
#include "smscore/normal.hpp"
#include "smscore/rng.hpp"

namespace smscore {

SandwichEstimate sandwich(const Dataset& data, const LossSpec& spec, const Eigen::VectorXd& b_hat,
                          FitDomain domain) {
    return sandwich(data, spec, b_hat, Eigen::VectorXd(), domain);
}

SandwichEstimate sandwich(const Dataset& data, const LossSpec& spec, const Eigen::VectorXd& b_hat,
                          const Eigen::VectorXd& weights, FitDomain domain) {
    const bool weighted = weights.size() > 0;
    if (weighted && weights.size() != data.n())
        throw ShapeError("infer", "weight vector length differs from n");
    const ObservationTerms terms = observation_terms(data, spec, b_hat);
    const Eigen::ArrayXd w = weighted ? Eigen::ArrayXd(weights.array()) : Eigen::ArrayXd::Ones(data.n());
    const double total = w.sum();
    if (!(total > 0.0)) throw InsufficientDataError("infer", "no observations carry weight");

    SandwichEstimate out;
    out.n = total;
    const Eigen::VectorXd h_w = (w * terms.hess_factor).matrix();
    const Eigen::VectorXd o_w = (w * terms.score_factor.square()).matrix();
    out.H_hat = data.x.transpose() * (h_w.asDiagonal() * data.x) / total;
    out.Omega_hat = data.x.transpose() * (o_w.asDiagonal() * data.x) / total;
    out.H_hat = 0.5 * (out.H_hat + out.H_hat.transpose()).eval();
    out.Omega_hat = 0.5 * (out.Omega_hat + out.Omega_hat.transpose()).eval();
    out.domain = domain;

    if (domain == FitDomain::Circle) {
        if (b_hat.size() != 2) throw ShapeError("infer", "the circle domain needs d = 2");
        const Eigen::VectorXd grad = data.x.transpose() * (w * terms.score_factor).matrix() / total;
        const Eigen::Vector2d t(-b_hat[1], b_hat[0]);
        const double curvature = t.dot(-out.H_hat * t);
        const double radial = grad.dot(b_hat);
        const double h_theta = -curvature - radial;
        out.condition_number = h_theta < 0.0 ? (std::abs(curvature) + std::abs(radial)) / -h_theta
                                             : std::numeric_limits<double>::infinity();
        if (!(h_theta < 0.0) || out.condition_number > kMaxCondition)
            throw IllConditionedError("angle curvature is not safely negative (condition number " +
                                          std::to_string(out.condition_number) + ")",
                                      out.condition_number);
        const double v_theta = t.dot(out.Omega_hat * t) / (h_theta * h_theta);
        out.V_hat = v_theta * (t * t.transpose());
        return out;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(-out.H_hat, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    out.condition_number = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(lo > 0.0) || out.condition_number > kMaxCondition)
        throw IllConditionedError("Hessian is not safely negative definite (condition number " +
                                      std::to_string(out.condition_number) + ")",
                                  out.condition_number);

    Eigen::LDLT<Eigen::MatrixXd> neg_h(-out.H_hat);
    const Eigen::MatrixXd h_inv_omega = neg_h.solve(out.Omega_hat);
    const Eigen::MatrixXd v = neg_h.solve(h_inv_omega.transpose());
    out.V_hat = 0.5 * (v + v.transpose());
    return out;
}

TargetValue evaluate_target(const Target& target, const Eigen::VectorXd& b) {
    if (std::holds_alternative<AngleTarget>(target)) {
        const Angle angle = angle_of(b);
        return {angle.theta, angle.gradient};
    }
    const auto& a = std::get<LinearTarget>(target).a;
    if (a.size() != b.size()) throw ShapeError("infer", "target vector dimension differs from b");
    if (a.isZero(0.0)) throw DomainError("infer", "target vector must be nonzero");
    return {a.dot(b), a};
}

double normal_critical(double level) {
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("infer", "level must lie in (0, 1)");
    return normal::quantile(1.0 - 0.5 * (1.0 - level));
}

CiReport ci_normal(double estimate, const Eigen::VectorXd& a_vec, const SandwichEstimate& sw,
                   double level) {
    const double z = normal_critical(level);
    if (a_vec.size() != sw.V_hat.rows()) throw ShapeError("infer", "a has the wrong dimension");
    if (a_vec.isZero(0.0)) throw DomainError("infer", "a must be nonzero");
    const double variance = a_vec.dot(sw.V_hat * a_vec);
    if (!(variance > 0.0))
        throw DegenerateVarianceError("infer", "a'Va is not positive (" + std::to_string(variance) + ")");
    CiReport ci;
    ci.estimate = estimate;
    ci.se = std::sqrt(variance / sw.n);
    ci.lo = estimate - z * ci.se;
    ci.hi = estimate + z * ci.se;
    ci.level = level;
    ci.method = CiMethod::NormalAnalytic;
    return ci;
}

CiReport ci_normal(const FitResult& fit, const SandwichEstimate& sw, const Target& target,
                   double level) {
    const TargetValue tv = evaluate_target(target, fit.b_hat);
    return ci_normal(tv.value, tv.gradient, sw, level);
}

double quantile_type7(std::span<const double> values, double prob) {
    if (values.empty()) throw InsufficientDataError("infer", "quantile of an empty sample");
    if (!(prob >= 0.0 && prob <= 1.0)) throw ConfigError("infer", "quantile probability outside [0, 1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

CiReport studentized_interval(double estimate, double sigma_hat, double n,
                              std::span<const double> t_draws, double level) {
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("infer", "level must lie in (0, 1)");
    const double alpha = 1.0 - level;
    const double q_lo = quantile_type7(t_draws, 0.5 * alpha);
    const double q_hi = quantile_type7(t_draws, 1.0 - 0.5 * alpha);
    CiReport ci;
    ci.estimate = estimate;
    ci.se = sigma_hat / std::sqrt(n);
    ci.lo = estimate - q_hi * ci.se;
    ci.hi = estimate - q_lo * ci.se;
    ci.level = level;
    ci.method = CiMethod::StudentizedBootstrap;
    ci.boot_draws = static_cast<int>(t_draws.size());
    return ci;
}

BootstrapResult bootstrap_studentized(const Dataset& data, const LossSpec& spec,
                                      const FitOptions& opts, const Target& target,
                                      const BootstrapOptions& boot) {
    const FitResult full = fit(data, spec, opts);
    if (full.on_boundary)
        throw DegenerateDataError("infer", "bootstrap needs an interior fit; the full-sample maximizer is on the boundary");
    return bootstrap_studentized(data, spec, opts, target, boot, full,
                                 sandwich(data, spec, full.b_hat, opts.domain));
}

BootstrapResult bootstrap_studentized(const Dataset& data, const LossSpec& spec,
                                      const FitOptions& opts, const Target& target,
                                      const BootstrapOptions& boot, const FitResult& full,
                                      const SandwichEstimate& sw) {
    if (boot.draws < 99) throw ConfigError("infer", "bootstrap needs at least 99 draws");
    if (!(boot.level > 0.0 && boot.level < 1.0)) throw ConfigError("infer", "level must lie in (0, 1)");

    const TargetValue est = evaluate_target(target, full.b_hat);
    const double sigma2 = est.gradient.dot(sw.V_hat * est.gradient);
    if (!(sigma2 > 0.0)) throw DegenerateVarianceError("infer", "a'Va is not positive");
    const double sigma_hat = std::sqrt(sigma2);
    const bool is_angle = std::holds_alternative<AngleTarget>(target);
    const double root_n = std::sqrt(static_cast<double>(data.n()));
    const auto n = static_cast<std::uint64_t>(data.n());
    const int max_rejections = static_cast<int>(std::floor(boot.max_rejection_rate * boot.draws));

    FitOptions refit_opts = opts;
    refit_opts.init = full.b_hat;

    BootstrapResult out;
    out.t_draws.reserve(static_cast<std::size_t>(boot.draws));
    Eigen::VectorXd counts(data.n());
    int rejections = 0;
    for (std::uint64_t k = 0; static_cast<int>(out.t_draws.size()) < boot.draws; ++k) {
        Rng rng(mix_seed({boot.seed, k}));
        counts.setZero();
        for (std::uint64_t i = 0; i < n; ++i) counts[static_cast<Eigen::Index>(rng.below(n))] += 1.0;

        double t_stat = 0.0;
        bool ok = false;
        try {
            const FitResult star = fit(data, spec, refit_opts, counts);
            if (!star.on_boundary) {
                const SandwichEstimate sw_star = sandwich(data, spec, star.b_hat, counts, opts.domain);
                const TargetValue tv = evaluate_target(target, star.b_hat);
                const double s2 = tv.gradient.dot(sw_star.V_hat * tv.gradient);
                if (s2 > 0.0) {
                    const double diff = is_angle ? wrap_angle(tv.value - est.value) : tv.value - est.value;
                    t_stat = root_n * diff / std::sqrt(s2);
                    ok = std::isfinite(t_stat);
                }
            }
        } catch (const Error&) {
            ok = false;
        }
        if (ok) {
            out.t_draws.push_back(t_stat);
        } else if (++rejections > max_rejections) {
            throw BootstrapInstabilityError("infer", std::to_string(rejections) +
                                                         " bootstrap resamples rejected (limit " +
                                                         std::to_string(max_rejections) + ")");
        }
    }
    out.ci = studentized_interval(est.value, sigma_hat, static_cast<double>(data.n()), out.t_draws,
                                  boot.level);
    out.ci.boot_rejections = rejections;
    return out;
}

}  // namespace smscore
