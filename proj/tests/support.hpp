#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "smscore/dataset.hpp"
#include "smscore/rng.hpp"

namespace testing {

inline bool close_rel(double got, double want, double rel, double abs_floor = 0.0) {
    return std::abs(got - want) <= rel * std::abs(want) + abs_floor;
}

// Rounding error of a central difference (f(u+h) - f(u-h)) / 2h.
inline double fd_rounding(double up, double dn, double h) {
    return 8.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(up), std::abs(dn)) / h +
           1e-300;
}

// Central differences of a scalar function of a vector.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& b, double h) {
    Eigen::VectorXd g(b.size());
    for (Eigen::Index k = 0; k < b.size(); ++k) {
        Eigen::VectorXd up = b, dn = b;
        up[k] += h;
        dn[k] -= h;
        g[k] = (f(up) - f(dn)) / (2.0 * h);
    }
    return g;
}

inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& b, double h) {
    const Eigen::Index d = b.size();
    Eigen::MatrixXd j(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        Eigen::VectorXd up = b, dn = b;
        up[k] += h;
        dn[k] -= h;
        j.col(k) = (f(up) - f(dn)) / (2.0 * h);
    }
    return j;
}

// Probit-style random design: y = 1{x'beta + e >= 0}, e logistic, x standard normal.
inline smscore::Dataset random_dataset(std::uint64_t seed, int n, const Eigen::VectorXd& beta) {
    smscore::Rng rng(seed);
    smscore::Dataset data;
    data.x.resize(n, beta.size());
    data.y.resize(n);
    for (int i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < beta.size(); ++k) data.x(i, k) = rng.normal();
        data.y[i] = data.x.row(i).dot(beta) + rng.logistic() >= 0.0 ? 1 : 0;
    }
    return data;
}

// Unconstrained logit maximum likelihood by plain Newton-Raphson. Shares no
// code with the library.
inline Eigen::VectorXd logit_newton(const smscore::Dataset& data) {
    const Eigen::Index d = data.d();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
    for (int iter = 0; iter < 100; ++iter) {
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(d);
        Eigen::MatrixXd info = Eigen::MatrixXd::Zero(d, d);
        for (Eigen::Index i = 0; i < data.n(); ++i) {
            const Eigen::VectorXd xi = data.x.row(i).transpose();
            const double p = 1.0 / (1.0 + std::exp(-xi.dot(b)));
            grad += (data.y[i] - p) * xi;
            info += p * (1.0 - p) * xi * xi.transpose();
        }
        const Eigen::VectorXd step = info.llt().solve(grad);
        b += step;
        if (step.norm() < 1e-14 * (1.0 + b.norm())) break;
    }
    return b;
}

// Best score_q0 over candidate directions: every arc between consecutive sign
// changes, probed at its midpoint. Returns {best score, list of best midpoints}.
struct Enumeration {
    double score = -1.0;
    std::vector<double> best;
};

inline Enumeration enumerate_directions(const smscore::Dataset& data) {
    std::vector<double> cuts;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        if (data.x(i, 0) == 0.0 && data.x(i, 1) == 0.0) continue;
        // x'(cos t, sin t) = 0 at t = atan2(x1, -x2) + k pi.
        const double t = std::atan2(data.x(i, 0), -data.x(i, 1));
        cuts.push_back(t);
        cuts.push_back(t > 0.0 ? t - std::numbers::pi : t + std::numbers::pi);
    }
    std::sort(cuts.begin(), cuts.end());
    Enumeration out;
    for (std::size_t k = 0; k < cuts.size(); ++k) {
        const double lo = cuts[k];
        const double hi = k + 1 < cuts.size() ? cuts[k + 1] : cuts[0] + 2.0 * std::numbers::pi;
        if (hi - lo < 1e-13) continue;
        const double mid = 0.5 * (lo + hi);
        int correct = 0;
        for (Eigen::Index i = 0; i < data.n(); ++i) {
            const double index = data.x(i, 0) * std::cos(mid) + data.x(i, 1) * std::sin(mid);
            correct += (index >= 0.0) == (data.y[i] == 1) ? 1 : 0;
        }
        const double score = static_cast<double>(correct) / static_cast<double>(data.n());
        if (score > out.score) {
            out.score = score;
            out.best.assign(1, mid);
        } else if (score == out.score) {
            out.best.push_back(mid);
        }
    }
    return out;
}

}  // namespace testing
