#include "smscore/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "smscore/error.hpp"

namespace smscore {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 60;
constexpr double kCollinearTol = 1e-10;

bool weighted(const Eigen::VectorXd& weights) { return weights.size() > 0; }

// Neumaier summation: Q is compared across line-search trials, so its rounding
// error has to stay well below the gains being tested.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

void check_dims(const Dataset& data, const Eigen::VectorXd& b) {
    if (b.size() != data.d())
        throw ShapeError("estimate", "coefficient has dimension " + std::to_string(b.size()) +
                                         " but data has d = " + std::to_string(data.d()));
}

ObjectiveValue evaluate(const Dataset& data, const LossSpec& spec, const Eigen::VectorXd& b,
                        const Eigen::VectorXd& weights) {
    const Eigen::Index n = data.n();
    const Eigen::VectorXd index = data.x * b;
    Eigen::VectorXd w1(n);
    Eigen::VectorXd w2(n);
    CompensatedSum q;
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = weighted(weights) ? weights[i] : 1.0;
        const double sign = data.y[i] == 1 ? 1.0 : -1.0;
        const auto phi = eval_phi(spec, sign * index[i]);
        q.add(w * phi.value);
        w1[i] = w * sign * phi.d1;
        w2[i] = w * phi.d2;
        total += w;
    }
    ObjectiveValue out;
    out.q = q.value() / total;
    out.grad = data.x.transpose() * w1 / total;
    out.hess = data.x.transpose() * (w2.asDiagonal() * data.x) / total;
    return out;
}

void check_estimable(const Dataset& data, const Eigen::VectorXd& weights) {
    validate_for_estimation(data);
    double ones = 0.0;
    double zeros = 0.0;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        const double w = weighted(weights) ? weights[i] : 1.0;
        if (w < 0.0 || !std::isfinite(w)) throw DomainError("estimate", "weights must be finite and nonnegative");
        (data.y[i] == 1 ? ones : zeros) += w;
    }
    if (ones <= 0.0 || zeros <= 0.0)
        throw DegenerateDataError("estimate", "only one outcome class carries weight");

    Eigen::MatrixXd moment;
    if (weighted(weights))
        moment = data.x.transpose() * (weights.asDiagonal() * data.x);
    else
        moment = data.x.transpose() * data.x;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(moment, Eigen::EigenvaluesOnly);
    const double hi = eig.eigenvalues().maxCoeff();
    const double lo = eig.eigenvalues().minCoeff();
    if (!(hi > 0.0) || lo <= kCollinearTol * hi)
        throw DegenerateDataError("estimate", "regressors are collinear (second-moment eigenvalue ratio " +
                                                  std::to_string(hi > 0.0 ? lo / hi : 0.0) + ")");
}

// Solves (-hess) step = rhs for negative (semi)definite hess. Falls back to a small
// ridge when the factorization is numerically singular, and to the gradient itself
// when even that fails.
Eigen::VectorXd newton_direction(const Eigen::MatrixXd& hess, const Eigen::VectorXd& rhs) {
    const Eigen::MatrixXd neg = -hess;
    const double scale = neg.trace() / static_cast<double>(neg.rows());
    Eigen::LDLT<Eigen::MatrixXd> ldlt(neg);
    const auto pivots = ldlt.vectorD();
    if (ldlt.info() == Eigen::Success && pivots.minCoeff() > 1e-12 * std::max(scale, 0.0) &&
        pivots.minCoeff() > 0.0)
        return ldlt.solve(rhs);
    if (scale > 0.0) {
        const Eigen::MatrixXd ridged =
            neg + 1e-12 * scale * Eigen::MatrixXd::Identity(neg.rows(), neg.cols());
        Eigen::LDLT<Eigen::MatrixXd> ridge(ridged);
        if (ridge.info() == Eigen::Success && ridge.vectorD().minCoeff() > 0.0) return ridge.solve(rhs);
    }
    return rhs;
}

Eigen::VectorXd project(const Eigen::VectorXd& b, double radius) {
    const double norm = b.norm();
    return norm > radius ? Eigen::VectorXd(b * (radius / norm)) : b;
}

// Orthonormal basis (d x (d-1)) of the complement of the unit vector u.
Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& u) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(u);
    const Eigen::MatrixXd q = qr.householderQ();
    return q.rightCols(u.size() - 1);
}

// Objective value only, for the angle grid.
double value_at(const Dataset& data, const LossSpec& spec, const Eigen::Vector2d& b,
                const Eigen::VectorXd& weights) {
    const Eigen::VectorXd index = data.x * b;
    CompensatedSum q;
    double total = 0.0;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        const double w = weighted(weights) ? weights[i] : 1.0;
        const double sign = data.y[i] == 1 ? 1.0 : -1.0;
        q.add(w * eval_phi(spec, sign * index[i]).value);
        total += w;
    }
    return q.value() / total;
}

Eigen::Vector2d on_circle(double theta, double radius) {
    return radius * Eigen::Vector2d(std::cos(theta), std::sin(theta));
}

struct CircleStep {
    double q;
    double d1;  // dQ/dtheta
    double d2;  // d2Q/dtheta2
};

CircleStep circle_derivatives(const ObjectiveValue& v, const Eigen::Vector2d& b) {
    const Eigen::Vector2d tangent(-b[1], b[0]);
    return {v.q, v.grad.dot(tangent), tangent.dot(v.hess * tangent) - v.grad.dot(b)};
}

struct CircleFit {
    double theta;
    ObjectiveValue value;
    double grad_norm;
    int iterations;
    std::vector<double> trace;
    bool converged;
};

// Safeguarded Newton ascent in theta from theta0.
CircleFit refine_angle(const Dataset& data, const LossSpec& spec, const FitOptions& opts,
                       const Eigen::VectorXd& weights, double theta0) {
    CircleFit out{theta0, evaluate(data, spec, on_circle(theta0, opts.radius), weights), 0.0, 0, {}, false};
    out.trace.push_back(out.value.q);
    for (int iter = 0;; ++iter) {
        const CircleStep cur = circle_derivatives(out.value, on_circle(out.theta, opts.radius));
        // Tangential gradient norm, comparable with the Ball criterion.
        out.grad_norm = std::abs(cur.d1) / opts.radius;
        out.iterations = iter;
        if (out.grad_norm <= opts.grad_tol) {
            out.converged = true;
            return out;
        }
        if (iter == opts.max_iter) return out;
        double step = cur.d2 < 0.0 ? -cur.d1 / cur.d2 : cur.d1 / (opts.radius * opts.radius);
        // Never move more than a quarter turn at once.
        step = std::clamp(step, -std::numbers::pi / 4.0, std::numbers::pi / 4.0);
        bool accepted = false;
        for (int halving = 0; halving <= kMaxHalvings; ++halving, step *= 0.5) {
            const double predicted = cur.d1 * step;
            if (!(predicted > 0.0)) break;
            ObjectiveValue next = evaluate(data, spec, on_circle(out.theta + step, opts.radius), weights);
            const bool negligible =
                halving == 0 && predicted <= 1e-13 * (1.0 + std::abs(cur.q));
            if (next.q >= cur.q + kArmijo * predicted || (negligible && next.q >= cur.q)) {
                out.theta = wrap_angle(out.theta + step);
                out.value = std::move(next);
                accepted = true;
                break;
            }
        }
        if (!accepted) return out;
        out.trace.push_back(out.value.q);
    }
}

FitResult fit_circle(const Dataset& data, const LossSpec& spec, const FitOptions& opts,
                     const Eigen::VectorXd& weights) {
    if (data.d() != 2) throw ShapeError("estimate", "the circle domain needs d = 2");
    if (opts.circle_grid < 8) throw ConfigError("estimate", "circle_grid must be at least 8");

    std::vector<double> starts;
    if (opts.init) {
        check_dims(data, *opts.init);
        if (!(opts.init->norm() > 0.0)) throw DomainError("estimate", "circle start must be nonzero");
        starts.push_back(std::atan2((*opts.init)[1], (*opts.init)[0]));
    } else {
        const int k = opts.circle_grid;
        std::vector<double> grid(static_cast<std::size_t>(k));
        std::vector<double> values(grid.size());
        for (int j = 0; j < k; ++j) {
            grid[j] = -std::numbers::pi + 2.0 * std::numbers::pi * j / k;
            values[j] = value_at(data, spec, on_circle(grid[j], opts.radius), weights);
        }
        for (int j = 0; j < k; ++j) {
            const double left = values[(j + k - 1) % k];
            const double right = values[(j + 1) % k];
            if (values[j] >= left && values[j] > right) starts.push_back(grid[j]);
        }
        if (starts.empty()) starts.push_back(grid[std::max_element(values.begin(), values.end()) - values.begin()]);
    }

    std::optional<CircleFit> best;
    for (double start : starts) {
        CircleFit cand = refine_angle(data, spec, opts, weights, start);
        if (!best || (cand.converged && !best->converged) ||
            (cand.converged == best->converged && cand.value.q > best->value.q))
            best = std::move(cand);
    }
    const Eigen::Vector2d b = on_circle(best->theta, opts.radius);
    if (!best->converged)
        throw IterationLimitError("no convergence on the circle after " + std::to_string(best->iterations) +
                                      " iterations (gradient norm " + std::to_string(best->grad_norm) + ")",
                                  b, best->grad_norm);
    FitResult result;
    result.b_hat = b;
    result.objective = best->value.q;
    result.grad_norm = best->grad_norm;
    result.iterations = best->iterations;
    result.on_boundary = false;
    result.theta_hat = best->theta;
    result.direction = b / opts.radius;
    result.trace = std::move(best->trace);
    return result;
}

}  // namespace

FitDomain parse_fit_domain(const std::string& name) {
    if (name == "ball") return FitDomain::Ball;
    if (name == "circle") return FitDomain::Circle;
    throw ConfigError("estimate", "unknown domain '" + name + "'; supported: ball, circle");
}

std::string fit_domain_name(FitDomain domain) { return domain == FitDomain::Ball ? "ball" : "circle"; }

ObservationTerms observation_terms(const Dataset& data, const LossSpec& spec,
                                   const Eigen::VectorXd& b) {
    check_dims(data, b);
    validate(spec);
    const Eigen::VectorXd index = data.x * b;
    ObservationTerms out;
    out.loss.resize(data.n());
    out.score_factor.resize(data.n());
    out.hess_factor.resize(data.n());
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        const double sign = data.y[i] == 1 ? 1.0 : -1.0;
        const auto phi = eval_phi(spec, sign * index[i]);
        out.loss[i] = phi.value;
        out.score_factor[i] = sign * phi.d1;
        out.hess_factor[i] = phi.d2;
    }
    return out;
}

ObjectiveValue objective(const Dataset& data, const LossSpec& spec, const Eigen::VectorXd& b) {
    return objective(data, spec, b, Eigen::VectorXd());
}

ObjectiveValue objective(const Dataset& data, const LossSpec& spec, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& weights) {
    check_dims(data, b);
    validate(spec);
    if (data.n() < 1) throw InsufficientDataError("estimate", "empty dataset");
    if (weighted(weights) && weights.size() != data.n())
        throw ShapeError("estimate", "weight vector length differs from n");
    return evaluate(data, spec, b, weights);
}

FitResult fit(const Dataset& data, const LossSpec& spec, const FitOptions& opts) {
    return fit(data, spec, opts, Eigen::VectorXd());
}

FitResult fit(const Dataset& data, const LossSpec& spec, const FitOptions& opts,
              const Eigen::VectorXd& weights) {
    validate(spec);
    if (!(opts.radius > 0.0)) throw ConfigError("estimate", "radius must be positive");
    if (!(opts.grad_tol > 0.0)) throw ConfigError("estimate", "grad_tol must be positive");
    if (opts.max_iter < 1) throw ConfigError("estimate", "max_iter must be at least 1");
    if (weighted(weights) && weights.size() != data.n())
        throw ShapeError("estimate", "weight vector length differs from n");
    check_estimable(data, weights);
    if (opts.domain == FitDomain::Circle) return fit_circle(data, spec, opts, weights);

    const double radius = opts.radius;
    Eigen::VectorXd b = opts.init ? *opts.init : Eigen::VectorXd::Zero(data.d());
    check_dims(data, b);
    b = project(b, radius);

    FitResult result;
    ObjectiveValue cur = evaluate(data, spec, b, weights);
    result.trace.push_back(cur.q);

    bool converged = false;
    bool on_boundary = false;
    double grad_norm = cur.grad.norm();
    int iter = 0;
    for (; iter <= opts.max_iter; ++iter) {
        const double norm = b.norm();
        on_boundary = norm >= radius * (1.0 - 1e-12) && cur.grad.dot(b) > 0.0;

        Eigen::VectorXd step;
        Eigen::MatrixXd basis;
        if (on_boundary) {
            // KKT on the sphere: grad = lambda b with lambda > 0. Newton on the
            // tangent space with the Riemannian Hessian of the sphere of radius R.
            const Eigen::VectorXd u = b / norm;
            const Eigen::VectorXd tangent_grad = cur.grad - cur.grad.dot(u) * u;
            grad_norm = tangent_grad.norm();
            if (grad_norm <= opts.grad_tol) {
                converged = true;
                break;
            }
            basis = tangent_basis(u);
            const double lambda = cur.grad.dot(u) / norm;
            Eigen::MatrixXd reduced = basis.transpose() * cur.hess * basis;
            reduced.diagonal().array() -= lambda;
            step = basis * newton_direction(reduced, basis.transpose() * cur.grad);
        } else {
            grad_norm = cur.grad.norm();
            if (grad_norm <= opts.grad_tol) {
                converged = true;
                break;
            }
            step = newton_direction(cur.hess, cur.grad);
        }
        if (iter == opts.max_iter) break;

        auto move = [&](double t) -> Eigen::VectorXd {
            if (on_boundary) {
                const Eigen::VectorXd moved = b + t * step;
                return moved * (radius / moved.norm());
            }
            return project(b + t * step, radius);
        };

        bool accepted = false;
        bool tried_gradient = false;
        double t = 1.0;
        for (int halving = 0; halving <= kMaxHalvings; ++halving, t *= 0.5) {
            const Eigen::VectorXd trial = move(t);
            // On the sphere the retraction's normal component is second order;
            // the Armijo model uses the tangential gain only.
            const double predicted = on_boundary ? t * cur.grad.dot(step) : cur.grad.dot(trial - b);
            if (!(predicted > 0.0)) {
                if (predicted == 0.0 && t == 1.0) break;
                if (!tried_gradient) {
                    // Projection turned the Newton step away from ascent.
                    step = on_boundary ? Eigen::VectorXd(cur.grad - cur.grad.dot(b) / (norm * norm) * b)
                                       : cur.grad;
                    tried_gradient = true;
                    t = 2.0;
                    halving = -1;
                }
                continue;
            }
            ObjectiveValue next = evaluate(data, spec, trial, weights);
            // Near the optimum the predicted gain drops below the rounding noise
            // of q; the full Newton step is then taken if q does not fall.
            const bool negligible =
                t == 1.0 && !tried_gradient && predicted <= 1e-13 * (1.0 + std::abs(cur.q));
            if (next.q >= cur.q + kArmijo * predicted || (negligible && next.q >= cur.q)) {
                b = trial;
                cur = std::move(next);
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        result.trace.push_back(cur.q);
    }

    result.iterations = iter;
    result.grad_norm = grad_norm;
    if (!converged)
        throw IterationLimitError("no convergence after " + std::to_string(iter) +
                                      " iterations (gradient norm " + std::to_string(grad_norm) + ")",
                                  b, grad_norm);

    result.b_hat = b;
    result.objective = cur.q;
    result.on_boundary = on_boundary;
    const double norm = b.norm();
    result.direction = norm > 0.0 ? Eigen::VectorXd(b / norm) : Eigen::VectorXd::Zero(b.size());
    if (b.size() == 2 && norm > 0.0) result.theta_hat = std::atan2(b[1], b[0]);
    if (on_boundary)
        result.warnings.push_back("maximizer lies on the boundary |b| = " + std::to_string(radius) +
                                  "; the data may be perfectly separated");
    return result;
}

Angle angle_of(const Eigen::Ref<const Eigen::VectorXd>& b) {
    if (b.size() != 2) throw ShapeError("estimate", "angle is defined for d = 2 only");
    const double sq = b.squaredNorm();
    if (!(sq > 0.0)) throw DomainError("estimate", "angle of the zero vector is undefined");
    return {std::atan2(b[1], b[0]), Eigen::Vector2d(-b[1], b[0]) / sq};
}

double wrap_angle(double delta) {
    constexpr double pi = std::numbers::pi;
    delta = std::remainder(delta, 2.0 * pi);
    return delta <= -pi ? delta + 2.0 * pi : delta;
}

}  // namespace smscore
