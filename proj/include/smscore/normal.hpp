#pragma once

#include <cmath>
#include <numbers>

namespace smscore::normal {

template <typename Scalar>
inline constexpr Scalar kLogSqrt2Pi = Scalar(0.91893853320467274178032973640561764L);

template <typename Scalar>
Scalar pdf(Scalar t) {
    using std::exp;
    return exp(-Scalar(0.5) * t * t - kLogSqrt2Pi<Scalar>);
}

template <typename Scalar>
Scalar cdf(Scalar t) {
    using std::erfc;
    return Scalar(0.5) * erfc(-t / std::numbers::sqrt2_v<Scalar>);
}

namespace detail {

// Below this point the lower tail goes through the Mills-ratio continued fraction.
template <typename Scalar>
inline constexpr Scalar kTailSwitch = Scalar(-5);

// Tail of the continued fraction R(x) = 1/(x + 1/(x + 2/(x + 3/(x + ...)))):
// returns T1 = 1/(x + 2/(x + 3/(x + ...))), so that 1/R(x) = x + T1.
// Only called for x >= 5, where 80 levels of backward recursion are exact to
// double rounding.
template <typename Scalar>
Scalar mills_tail(Scalar x) {
    Scalar t = 0;
    for (int k = 80; k >= 1; --k) t = Scalar(k) / (x + t);
    return t;
}

}  // namespace detail

// log Phi(t), finite for every finite t.
template <typename Scalar>
Scalar log_cdf(Scalar t) {
    using std::erfc;
    using std::log;
    using std::log1p;
    if (t < detail::kTailSwitch<Scalar>) {
        const Scalar x = -t;
        const Scalar inv_r = x + detail::mills_tail(x);
        return -Scalar(0.5) * t * t - kLogSqrt2Pi<Scalar> - log(inv_r);
    }
    if (t > 0) return log1p(-Scalar(0.5) * erfc(t / std::numbers::sqrt2_v<Scalar>));
    return log(cdf(t));
}

// Inverse Mills ratio r(t) = pdf(t)/Phi(t) together with t + r(t).
// Both are positive for every finite t; the second is the factor in the
// second derivative of log Phi and is computed without cancellation.
template <typename Scalar>
struct InvMills {
    Scalar ratio;
    Scalar shifted;
};

template <typename Scalar>
InvMills<Scalar> inv_mills(Scalar t) {
    if (t < detail::kTailSwitch<Scalar>) {
        const Scalar x = -t;
        const Scalar tail = detail::mills_tail(x);
        return {x + tail, tail};
    }
    const Scalar r = pdf(t) / cdf(t);
    return {r, t + r};
}

// Standard normal quantile, Wichura's AS 241 (PPND16), about 1e-16 relative.
double quantile(double p);

}  // namespace smscore::normal
