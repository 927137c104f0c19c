#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "smscore/error.hpp"
#include "smscore/normal.hpp"

namespace smscore {

enum class LossKind { Logistic, PseudoHuber, Probit };

// Surrogate score phi(u) = -loss(u):
//   Logistic     loss(u) = log(1 + exp(-a u)) / a
//   PseudoHuber  loss(u) = sqrt(a^2 + u^2) - u
//   Probit       loss(u) = -log Phi(a u)
struct LossSpec {
    LossKind kind = LossKind::Logistic;
    double a = 1.0;

    // Scale parameters used in the reference simulations.
    static LossSpec logistic(double a = 1.0) { return {LossKind::Logistic, a}; }
    static LossSpec huber(double a = 2.0) { return {LossKind::PseudoHuber, a}; }
    static LossSpec probit(double a = 0.5) { return {LossKind::Probit, a}; }

    friend bool operator==(const LossSpec&, const LossSpec&) = default;
};

double default_scale(LossKind kind);

// CLI names: "logistic", "huber", "probit".
LossKind parse_loss_kind(std::string_view name);
std::string_view loss_name(LossKind kind);

void validate(const LossSpec& spec);

template <typename Scalar>
struct PhiEval {
    Scalar value;
    Scalar d1;
    Scalar d2;
};

namespace detail {

template <typename Scalar>
PhiEval<Scalar> logistic_phi(Scalar a, Scalar u) {
    using std::exp;
    using std::log1p;
    const Scalar z = a * u;
    // e = exp(-|z|) never overflows; sigma(-z) = d1 is e/(1+e) or 1/(1+e).
    const Scalar e = exp(-std::abs(z));
    const Scalar value = z >= 0 ? -log1p(e) / a : u - log1p(e) / a;
    const Scalar d1 = z >= 0 ? e / (Scalar(1) + e) : Scalar(1) / (Scalar(1) + e);
    const Scalar d2 = -a * e / ((Scalar(1) + e) * (Scalar(1) + e));
    return {value, d1, d2};
}

template <typename Scalar>
PhiEval<Scalar> huber_phi(Scalar a, Scalar u) {
    using std::hypot;
    const Scalar h = hypot(a, u);
    const Scalar a2 = a * a;
    // u - h and 1 - u/h cancel for large positive u; rewrite both as a^2 over a sum.
    Scalar value = u > 0 ? -a2 / (h + u) : u - h;
    if (value < -std::numeric_limits<Scalar>::max()) value = std::numeric_limits<Scalar>::lowest();
    const Scalar d1 = u > 0 ? a2 / (h * (h + u)) : Scalar(1) - u / h;
    const Scalar ratio = a / h;
    const Scalar d2 = -ratio * ratio / h;
    return {value, d1, d2};
}

template <typename Scalar>
PhiEval<Scalar> probit_phi(Scalar a, Scalar u) {
    using Limits = std::numeric_limits<Scalar>;
    const Scalar t = a * u;
    // Far left log Phi ~ -t^2/2 and phi' ~ a^2 |u| leave the double range; they
    // saturate at the extreme finite values while phi'' tends to -a^2.
    if (t < -Limits::max()) return {Limits::lowest(), Limits::max(), -a * a};
    if (t > Limits::max()) return {Scalar(0), Scalar(0), Scalar(0)};
    const auto mills = normal::inv_mills(t);
    Scalar value = normal::log_cdf(t);
    if (value < -Limits::max()) value = Limits::lowest();
    Scalar d1 = a * mills.ratio;
    if (d1 > Limits::max()) d1 = Limits::max();
    return {value, d1, -a * a * (mills.ratio * mills.shifted)};
}

}  // namespace detail

// phi(u) and its first two derivatives. Finite for every finite u; where the
// exact value leaves the double range it saturates at the extreme finite value.
// The spec is assumed valid; callers on untrusted input run validate() first.
template <typename Scalar = double>
PhiEval<Scalar> eval_phi(const LossSpec& spec, Scalar u) {
    const auto a = static_cast<Scalar>(spec.a);
    switch (spec.kind) {
        case LossKind::Logistic: return detail::logistic_phi(a, u);
        case LossKind::PseudoHuber: return detail::huber_phi(a, u);
        case LossKind::Probit: return detail::probit_phi(a, u);
    }
    return {};
}

template <typename Scalar>
struct ObsLoss {
    Scalar loss;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> score;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> hess;
};

// l(z, b) = y phi(x'b) + (1 - y) phi(-x'b) with its gradient and Hessian in b.
// Since y is binary this is phi(s x'b) with s = 2y - 1.
template <typename DerivedX, typename DerivedB>
auto eval_obs_loss(const LossSpec& spec, int y, const Eigen::MatrixBase<DerivedX>& x,
                   const Eigen::MatrixBase<DerivedB>& b) {
    using Scalar = typename DerivedX::Scalar;
    if (x.size() != b.size() || x.size() < 1)
        throw ShapeError("loss", "observation and coefficient dimensions differ: " +
                                     std::to_string(x.size()) + " vs " + std::to_string(b.size()));
    if (y != 0 && y != 1) throw DomainError("loss", "y must be 0 or 1");
    validate(spec);
    const Scalar sign = y == 1 ? Scalar(1) : Scalar(-1);
    const Scalar u = x.dot(b.template cast<Scalar>());
    const auto phi = eval_phi<Scalar>(spec, sign * u);
    ObsLoss<Scalar> out;
    out.loss = phi.value;
    out.score = (sign * phi.d1) * x;
    out.hess = phi.d2 * (x * x.transpose());
    return out;
}

}  // namespace smscore
