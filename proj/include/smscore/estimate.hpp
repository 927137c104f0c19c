#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "smscore/dataset.hpp"
#include "smscore/loss.hpp"

namespace smscore {

// Ball: maximize over {|b| <= radius}. Circle (d = 2): maximize over
// b(theta) = radius (cos theta, sin theta), i.e. estimate the angle directly.
enum class FitDomain { Ball, Circle };

// "ball", "circle".
FitDomain parse_fit_domain(const std::string& name);
std::string fit_domain_name(FitDomain domain);

struct FitOptions {
    FitDomain domain = FitDomain::Ball;
    double radius = 100.0;     // B = {b : |b| <= radius}
    double grad_tol = 1e-10;   // on |grad| (interior) or its tangential part (boundary)
    int max_iter = 200;
    std::optional<Eigen::VectorXd> init;  // default: the origin (Ball), a global angle grid (Circle)
    int circle_grid = 128;                // angles scanned for the Circle start
};

struct FitResult {
    Eigen::VectorXd b_hat;
    double objective = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool on_boundary = false;
    std::optional<double> theta_hat;  // d == 2 only
    Eigen::VectorXd direction;         // b_hat / |b_hat|
    std::vector<std::string> warnings;
    std::vector<double> trace;         // objective after each accepted step, starting at init
};

// Sample surrogate objective Q(b) = mean_i l(z_i, b) with its gradient and Hessian.
struct ObjectiveValue {
    double q = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
};

// Per-observation pieces at b: l_i, the scalar factor g_i with score_i = g_i x_i,
// and h_i with hess_i = h_i x_i x_i'.
struct ObservationTerms {
    Eigen::ArrayXd loss;
    Eigen::ArrayXd score_factor;
    Eigen::ArrayXd hess_factor;
};

ObservationTerms observation_terms(const Dataset& data, const LossSpec& spec,
                                   const Eigen::VectorXd& b);

ObjectiveValue objective(const Dataset& data, const LossSpec& spec, const Eigen::VectorXd& b);

// Frequency-weighted version; Q(b) = sum_i w_i l_i / sum_i w_i. Used for
// bootstrap resamples, where w_i counts how often row i was drawn.
ObjectiveValue objective(const Dataset& data, const LossSpec& spec, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& weights);

// Maximizer of the sample objective over the ball of radius opts.radius, or over
// the circle of that radius. On the circle the objective need not be unimodal in
// theta; without an init every local maximum of the grid is refined and the best
// kept. With an init only the nearest local maximum is found.
FitResult fit(const Dataset& data, const LossSpec& spec, const FitOptions& opts = {});
FitResult fit(const Dataset& data, const LossSpec& spec, const FitOptions& opts,
              const Eigen::VectorXd& weights);

// theta = atan2(b2, b1) and its gradient (-b2, b1)/|b|^2.
struct Angle {
    double theta;
    Eigen::Vector2d gradient;
};

Angle angle_of(const Eigen::Ref<const Eigen::VectorXd>& b);

// Angle difference wrapped into (-pi, pi].
double wrap_angle(double delta);

}  // namespace smscore
