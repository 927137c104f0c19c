#pragma once

#include <utility>

#include <Eigen/Core>

#include "smscore/dataset.hpp"

namespace smscore {

// Fraction of observations whose sign is classified correctly by x'b >= 0.
double score_q0(const Dataset& data, const Eigen::Ref<const Eigen::VectorXd>& b);

struct MaxScoreFit {
    double theta_hat = 0.0;
    double score = 0.0;
    // Open arc of directions on which the score attains its maximum, written as
    // (theta_hat - w/2, theta_hat + w/2); it may extend past +-pi.
    std::pair<double, double> argmax_interval{0.0, 0.0};
};

// Exact global maximizer of score_q0 over directions b(theta) = (cos, sin)(theta),
// d = 2. Sweeps the 2n angles where some x_i'b(theta) changes sign and returns
// the midpoint of the best arc; ties go to the arc whose midpoint is nearest
// angle 0, then to the earliest arc in sorted order.
MaxScoreFit fit_maxscore_2d(const Dataset& data);

}  // namespace smscore
