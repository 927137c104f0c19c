#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "smscore/dataset.hpp"
#include "smscore/estimate.hpp"
#include "smscore/loss.hpp"

namespace smscore {

// Plug-in pieces of the asymptotic covariance of sqrt(n)(b_hat - b):
// H = Hessian of Q at b_hat, Omega = mean of score outer products, V = H^-1 Omega H^-1.
struct SandwichEstimate {
    Eigen::MatrixXd H_hat;
    Eigen::MatrixXd Omega_hat;
    Eigen::MatrixXd V_hat;
    double n = 0.0;  // sample size (sum of weights for resamples)
    double condition_number = 0.0;
    // Circle: V_hat = t V_theta t' with t = db/dtheta and V_theta the scalar
    // sandwich of the angle, so a'V a is the delta-method variance of theta.
    FitDomain domain = FitDomain::Ball;
};

// Largest condition number of H_hat accepted by sandwich().
inline constexpr double kMaxCondition = 1e12;

SandwichEstimate sandwich(const Dataset& data, const LossSpec& spec, const Eigen::VectorXd& b_hat,
                          FitDomain domain = FitDomain::Ball);
SandwichEstimate sandwich(const Dataset& data, const LossSpec& spec, const Eigen::VectorXd& b_hat,
                          const Eigen::VectorXd& weights, FitDomain domain = FitDomain::Ball);

// Scalar inference target: the angle atan2(b2, b1) (delta method) or a'b.
struct AngleTarget {};
struct LinearTarget {
    Eigen::VectorXd a;
};
using Target = std::variant<AngleTarget, LinearTarget>;

struct TargetValue {
    double value;
    Eigen::VectorXd gradient;
};

TargetValue evaluate_target(const Target& target, const Eigen::VectorXd& b);

enum class CiMethod { NormalAnalytic, StudentizedBootstrap };

struct CiReport {
    double estimate = 0.0;
    double se = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double level = 0.95;
    CiMethod method = CiMethod::NormalAnalytic;
    std::optional<int> boot_draws;
    std::optional<int> boot_rejections;

    bool covers(double value) const { return lo <= value && value <= hi; }
};

// Two-sided standard normal critical value for a (level) confidence interval.
double normal_critical(double level);

// estimate +- z se with se = sqrt(a'Va / n).
CiReport ci_normal(double estimate, const Eigen::VectorXd& a_vec, const SandwichEstimate& sw,
                   double level);
CiReport ci_normal(const FitResult& fit, const SandwichEstimate& sw, const Target& target,
                   double level);

// Sample quantile by linear interpolation of order statistics (R type 7).
double quantile_type7(std::span<const double> values, double prob);

// [est - q(1 - alpha/2) sigma/sqrt(n), est - q(alpha/2) sigma/sqrt(n)] from
// bootstrap t statistics.
CiReport studentized_interval(double estimate, double sigma_hat, double n,
                              std::span<const double> t_draws, double level);

struct BootstrapOptions {
    int draws = 999;
    double level = 0.95;
    std::uint64_t seed = 0;
    double max_rejection_rate = 0.2;
};

struct BootstrapResult {
    CiReport ci;
    std::vector<double> t_draws;
};

// Nonparametric studentized bootstrap. Resample k uses the stream
// mix_seed({seed, k}); resamples whose refit fails, lands on the boundary or has
// an unusable sandwich are rejected and the next stream is drawn.
BootstrapResult bootstrap_studentized(const Dataset& data, const LossSpec& spec,
                                      const FitOptions& opts, const Target& target,
                                      const BootstrapOptions& boot);

// Same, reusing an interior fit of the full sample and its sandwich.
BootstrapResult bootstrap_studentized(const Dataset& data, const LossSpec& spec,
                                      const FitOptions& opts, const Target& target,
                                      const BootstrapOptions& boot, const FitResult& fit,
                                      const SandwichEstimate& sw);

}  // namespace smscore
