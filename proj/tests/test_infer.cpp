#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "smscore/dgp.hpp"
#include "smscore/error.hpp"
#include "smscore/infer.hpp"
#include "smscore/stats.hpp"
#include "support.hpp"

using namespace smscore;

namespace {

const std::vector<LossSpec> kLosses = {LossSpec::logistic(), LossSpec::huber(), LossSpec::probit()};

SandwichEstimate identity_sandwich(double n) {
    SandwichEstimate sw;
    sw.H_hat = -Eigen::Matrix2d::Identity();
    sw.Omega_hat = Eigen::Matrix2d::Identity();
    sw.V_hat = Eigen::Matrix2d::Identity();
    sw.n = n;
    return sw;
}

}  // namespace

TEST_CASE("identical observations") {
    Eigen::VectorXd x(1);
    x << 0.6;
    Eigen::VectorXd b(1);
    b << 0.3;
    for (const auto& spec : kLosses) {
        for (int n : {2, 7}) {
            Dataset data;
            data.x = x.transpose().replicate(n, 1);
            data.y = Eigen::VectorXi::Ones(n);
            const auto obs = eval_obs_loss(spec, 1, x, b);
            const SandwichEstimate sw = sandwich(data, spec, b);
            const Eigen::MatrixXd outer = obs.score * obs.score.transpose();
            CHECK(std::abs(sw.Omega_hat(0, 0) - outer(0, 0)) <= 1e-15 * outer(0, 0));
            CHECK(std::abs(sw.H_hat(0, 0) - obs.hess(0, 0)) <= 1e-15 * std::abs(obs.hess(0, 0)));
            CHECK(sw.V_hat(0, 0) == doctest::Approx(outer(0, 0) / (obs.hess(0, 0) * obs.hess(0, 0))));
        }
    }
    // Repeated rows in two dimensions give a rank one Hessian.
    Dataset flat;
    flat.x = Eigen::RowVector2d(0.6, -1.4).replicate(5, 1);
    flat.y = Eigen::VectorXi::Ones(5);
    CHECK_THROWS_AS(sandwich(flat, LossSpec::logistic(), Eigen::Vector2d(0.3, 0.2)), IllConditionedError);
}

TEST_CASE("sandwich pieces") {
    const Dataset data = testing::random_dataset(5, 100, Eigen::Vector2d(1, 0.5));
    for (const auto& spec : kLosses) {
        const FitResult fr = fit(data, spec);
        const SandwichEstimate sw = sandwich(data, spec, fr.b_hat);
        auto grad = [&](const Eigen::VectorXd& b) { return objective(data, spec, b).grad; };
        const Eigen::MatrixXd fd = testing::fd_jacobian(grad, fr.b_hat, 1e-5);
        CHECK((fd - sw.H_hat).cwiseAbs().maxCoeff() <= 1e-5);
        CHECK(sw.H_hat.isApprox(sw.H_hat.transpose(), 0.0));
        CHECK(sw.V_hat.isApprox(sw.V_hat.transpose(), 0.0));
        const Eigen::MatrixXd h_inv = sw.H_hat.inverse();
        CHECK((sw.V_hat - h_inv * sw.Omega_hat * h_inv).norm() <= 1e-10 * sw.V_hat.norm());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eo(sw.Omega_hat), ev(sw.V_hat);
        CHECK(eo.eigenvalues().minCoeff() >= 0.0);
        CHECK(ev.eigenvalues().minCoeff() > 0.0);
        CHECK(sw.n == 100.0);
        CHECK(sw.condition_number >= 1.0);

        // Omega is the mean outer product of per-observation scores.
        Eigen::Matrix2d omega = Eigen::Matrix2d::Zero();
        for (Eigen::Index i = 0; i < data.n(); ++i) {
            const auto obs = eval_obs_loss(spec, data.y[i], Eigen::Vector2d(data.x.row(i)), fr.b_hat);
            omega += obs.score * obs.score.transpose();
        }
        CHECK((omega / 100.0 - sw.Omega_hat).norm() <= 1e-13);
    }
}

TEST_CASE("circle sandwich is the scalar angle sandwich") {
    const Dataset data = gen_dataset(SimDesign::of(XDist::Laplace), 300, 6);
    for (const auto& spec : kLosses) {
        FitOptions opts;
        opts.domain = FitDomain::Circle;
        opts.radius = 1.0;
        const FitResult fr = fit(data, spec, opts);
        const double th = *fr.theta_hat;
        auto q_theta = [&](double t) { return objective(data, spec, Eigen::Vector2d(std::cos(t), std::sin(t))).q; };
        const double h = 1e-4;
        const double curvature = (q_theta(th + h) - 2.0 * q_theta(th) + q_theta(th - h)) / (h * h);
        double omega = 0.0;
        const Eigen::Vector2d t(-fr.b_hat[1], fr.b_hat[0]);
        for (Eigen::Index i = 0; i < data.n(); ++i) {
            const double s = eval_obs_loss(spec, data.y[i], Eigen::Vector2d(data.x.row(i)), fr.b_hat).score.dot(t);
            omega += s * s / 300.0;
        }
        const SandwichEstimate sw = sandwich(data, spec, fr.b_hat, FitDomain::Circle);
        CHECK(sw.domain == FitDomain::Circle);
        const Angle angle = angle_of(fr.b_hat);
        const double v = angle.gradient.dot(sw.V_hat * angle.gradient);
        CHECK(v == doctest::Approx(omega / (curvature * curvature)).epsilon(1e-5));
    }
}

TEST_CASE("ill-conditioned Hessian") {
    Dataset data = testing::random_dataset(2, 50, Eigen::Vector2d(1, 1));
    data.x.col(1) = data.x.col(0);
    try {
        sandwich(data, LossSpec::logistic(), Eigen::Vector2d(0.1, 0.1));
        FAIL("expected an ill-conditioned error");
    } catch (const IllConditionedError& e) {
        CHECK(e.condition_number() > kMaxCondition);
        CHECK(e.kind() == "ill_conditioned");
    }
}

TEST_CASE("normal interval arithmetic") {
    const SandwichEstimate sw = identity_sandwich(100.0);
    const CiReport ci = ci_normal(2.0, Eigen::Vector2d(1, 0), sw, 0.95);
    CHECK(ci.estimate == 2.0);
    CHECK(ci.se == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(ci.lo == doctest::Approx(2.0 - 0.1959963984540054).epsilon(1e-14));
    CHECK(ci.hi == doctest::Approx(2.0 + 0.1959963984540054).epsilon(1e-14));
    CHECK((ci.hi - ci.lo) / 2.0 == doctest::Approx(1.959964 * ci.se).epsilon(1e-6));
    CHECK(ci.method == CiMethod::NormalAnalytic);
    CHECK(ci.covers(2.1));
    CHECK_FALSE(ci.covers(2.2));

    FitResult fr;
    fr.b_hat = Eigen::Vector2d(2, 1);
    const CiReport via_fit = ci_normal(fr, sw, LinearTarget{Eigen::Vector2d(1, 0)}, 0.95);
    CHECK(via_fit.lo == ci.lo);
    CHECK(normal_critical(0.90) == doctest::Approx(1.6448536269514722).epsilon(1e-14));

    SandwichEstimate zero = sw;
    zero.V_hat.setZero();
    CHECK_THROWS_AS(ci_normal(2.0, Eigen::Vector2d(1, 0), zero, 0.95), DegenerateVarianceError);
    CHECK_THROWS_AS(ci_normal(2.0, Eigen::Vector2d(0, 0), sw, 0.95), DomainError);
    CHECK_THROWS_AS(ci_normal(2.0, Eigen::Vector2d(1, 0), sw, 1.5), ConfigError);
    CHECK_THROWS_AS(ci_normal(2.0, Eigen::Vector3d(1, 0, 0), sw, 0.95), ShapeError);
}

TEST_CASE("type 7 quantiles") {
    const std::vector<double> v = {3.5, -1.25, 7, 0, 2, 9.5, 4, -3, 6, 1};
    CHECK(quantile_type7(v, 0.0) == -3.0);
    CHECK(quantile_type7(v, 0.025) == doctest::Approx(-2.60625));
    CHECK(quantile_type7(v, 0.1) == doctest::Approx(-1.425));
    CHECK(quantile_type7(v, 0.5) == doctest::Approx(2.75));
    CHECK(quantile_type7(v, 0.9) == doctest::Approx(7.25));
    CHECK(quantile_type7(v, 0.975) == doctest::Approx(8.9375));
    CHECK(quantile_type7(v, 1.0) == 9.5);
    CHECK_THROWS_AS(quantile_type7(std::vector<double>{}, 0.5), InsufficientDataError);
}

TEST_CASE("degenerate bootstrap draws") {
    const std::vector<double> t(999, 1.3);
    const CiReport ci = studentized_interval(0.7, 2.0, 400.0, t, 0.95);
    CHECK(ci.lo == doctest::Approx(0.7 - 1.3 * 2.0 / 20.0));
    CHECK(ci.hi == ci.lo);
    CHECK(ci.boot_draws == 999);
    CHECK(ci.method == CiMethod::StudentizedBootstrap);
}

TEST_CASE("bootstrap is deterministic and well formed") {
    const Dataset data = gen_dataset(SimDesign::of(XDist::Normal), 250, 31);
    BootstrapOptions boot;
    boot.draws = 199;
    boot.seed = 7;
    for (const auto& spec : kLosses) {
        const BootstrapResult a = bootstrap_studentized(data, spec, {}, AngleTarget{}, boot);
        const BootstrapResult b = bootstrap_studentized(data, spec, {}, AngleTarget{}, boot);
        CHECK(a.ci.lo == b.ci.lo);
        CHECK(a.ci.hi == b.ci.hi);
        CHECK(a.t_draws == b.t_draws);
        CHECK(a.t_draws.size() == 199);
        CHECK(a.ci.lo < a.ci.estimate);
        CHECK(a.ci.estimate < a.ci.hi);
        CHECK(*a.ci.boot_rejections == 0);
        // t draws are roughly standard normal.
        CHECK(std::abs(stats::mean(a.t_draws)) < 0.3);
        CHECK(std::sqrt(stats::variance(a.t_draws)) == doctest::Approx(1.0).epsilon(0.25));

        boot.seed = 8;
        const BootstrapResult c = bootstrap_studentized(data, spec, {}, AngleTarget{}, boot);
        CHECK(c.ci.lo != a.ci.lo);
        boot.seed = 7;
    }
    FitOptions circle;
    circle.domain = FitDomain::Circle;
    circle.radius = 1.0;
    const BootstrapResult on_circle = bootstrap_studentized(data, LossSpec::probit(), circle, AngleTarget{}, boot);
    CHECK(on_circle.ci.lo < on_circle.ci.hi);

    const BootstrapResult linear =
        bootstrap_studentized(data, LossSpec::logistic(), {}, LinearTarget{Eigen::Vector2d(1, -1)}, boot);
    CHECK(linear.ci.lo < linear.ci.hi);
    boot.draws = 50;
    CHECK_THROWS_AS(bootstrap_studentized(data, LossSpec::logistic(), {}, AngleTarget{}, boot), ConfigError);
}

TEST_CASE("bootstrap gives up on nearly separated data") {
    // One misclassified point: most resamples omit it and separate perfectly.
    Rng rng(4);
    Dataset data;
    const int n = 40;
    data.x.resize(n, 2);
    data.y.resize(n);
    for (int i = 0; i < n; ++i) {
        data.x(i, 0) = rng.normal();
        data.x(i, 1) = rng.normal();
        data.y[i] = data.x(i, 0) - data.x(i, 1) >= 0.0 ? 1 : 0;
    }
    data.x.row(0) << 2.0, -2.0;
    data.y[0] = 0;
    BootstrapOptions boot;
    boot.draws = 199;
    CHECK_THROWS_AS(bootstrap_studentized(data, LossSpec::logistic(), {}, AngleTarget{}, boot),
                    BootstrapInstabilityError);
}

TEST_CASE("analytic and bootstrap coverage, logistic, normal design") {
    const SimDesign design = SimDesign::of(XDist::Normal);
    const double theta0 = std::numbers::pi / 4;

    std::vector<double> thetas, ses;
    int covered = 0;
    for (int r = 0; r < 2000; ++r) {
        const Dataset data = gen_dataset(design, 1000, mix_seed({1000, static_cast<std::uint64_t>(r)}));
        const FitResult fr = fit(data, LossSpec::logistic());
        const CiReport ci = ci_normal(fr, sandwich(data, LossSpec::logistic(), fr.b_hat), AngleTarget{}, 0.95);
        thetas.push_back(ci.estimate);
        ses.push_back(ci.se);
        covered += ci.covers(theta0) ? 1 : 0;
    }
    const double coverage = covered / 2000.0;
    CHECK(coverage >= 0.925);
    CHECK(coverage <= 0.965);
    CHECK(stats::mean(ses) == doctest::Approx(std::sqrt(stats::variance(thetas))).epsilon(0.07));

    // The small-sample check uses the unit-circle angle estimator.
    FitOptions circle;
    circle.domain = FitDomain::Circle;
    circle.radius = 1.0;
    int boot_hits = 0;
    int analytic_hits = 0;
    BootstrapOptions boot;
    boot.draws = 399;
    for (int r = 0; r < 1000; ++r) {
        const Dataset data = gen_dataset(design, 250, mix_seed({250, static_cast<std::uint64_t>(r)}));
        const FitResult fr = fit(data, LossSpec::logistic(), circle);
        const SandwichEstimate sw = sandwich(data, LossSpec::logistic(), fr.b_hat, FitDomain::Circle);
        analytic_hits += ci_normal(fr, sw, AngleTarget{}, 0.95).covers(theta0) ? 1 : 0;
        boot.seed = static_cast<std::uint64_t>(r);
        boot_hits += bootstrap_studentized(data, LossSpec::logistic(), circle, AngleTarget{}, boot, fr, sw).ci.covers(theta0);
    }
    const double boot_cov = boot_hits / 1000.0;
    CHECK(boot_cov >= 0.91);
    CHECK(boot_cov <= 0.96);
    CHECK(boot_cov >= analytic_hits / 1000.0 - 0.01);
}
