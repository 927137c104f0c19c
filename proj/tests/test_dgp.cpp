#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "smscore/dgp.hpp"
#include "smscore/error.hpp"
#include "smscore/rng.hpp"

using namespace smscore;
namespace fs = std::filesystem;

namespace {

Eigen::Matrix2d sample_cov(const Eigen::MatrixX2d& x) {
    const Eigen::RowVector2d mu = x.colwise().mean();
    const Eigen::MatrixX2d c = x.rowwise() - mu;
    return c.transpose() * c / static_cast<double>(x.rows() - 1);
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "smscore_test_dgp";
    fs::create_directories(dir);
    return dir / name;
}

fs::path write_text(const std::string& name, const std::string& text) {
    const fs::path p = scratch(name);
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("regressor covariance by design") {
    const SimDesign normal = SimDesign::of(XDist::Normal);
    const Eigen::Matrix2d cn = sample_cov(sample_x(normal, 200000, 7));
    CHECK((cn - normal.sigma).cwiseAbs().maxCoeff() <= 0.02);

    const SimDesign t5 = SimDesign::of(XDist::T5);
    const Eigen::Matrix2d ct = sample_cov(sample_x(t5, 200000, 7));
    CHECK((ct - (5.0 / 3.0) * t5.sigma).cwiseAbs().maxCoeff() <= 0.05);

    // E[S] = 1 for S ~ Exp(1), so the Laplace mixture keeps sigma.
    const SimDesign laplace = SimDesign::of(XDist::Laplace);
    const Eigen::Matrix2d cl = sample_cov(sample_x(laplace, 200000, 7));
    CHECK((cl - laplace.sigma).cwiseAbs().maxCoeff() <= 0.03);
}

TEST_CASE("same seed, same data") {
    for (XDist d : {XDist::Normal, XDist::T5, XDist::Laplace}) {
        const Dataset a = gen_dataset(SimDesign::of(d), 5, 42);
        const Dataset b = gen_dataset(SimDesign::of(d), 5, 42);
        CHECK(a.x == b.x);
        CHECK(a.y == b.y);
        const Dataset c = gen_dataset(SimDesign::of(d), 5, 43);
        CHECK(a.x != c.x);
    }
}

TEST_CASE("error stream does not move the regressors") {
    const SimDesign design = SimDesign::of(XDist::T5);
    const SubSeeds base = SubSeeds::from(5);
    const Dataset a = gen_dataset(design, 300, base);
    const Dataset b = gen_dataset(design, 300, SubSeeds{base.x, base.eps + 1});
    CHECK(a.x == b.x);
    CHECK(a.y != b.y);
    CHECK(gen_dataset(design, 300, 5).x == a.x);
    CHECK(sample_x(design, 300, base.x) == a.x);
}

TEST_CASE("outcome frequencies") {
    const SimDesign design = SimDesign::of(XDist::Normal);
    const Dataset data = gen_dataset(design, 500000, 1);
    CHECK(data.y.cast<double>().mean() >= 0.49);
    CHECK(data.y.cast<double>().mean() <= 0.51);

    const Eigen::VectorXd index = data.x * design.b0;
    double hits = 0.0;
    double count = 0.0;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        if (index[i] >= 0.95 && index[i] <= 1.05) {
            count += 1.0;
            hits += data.y[i];
        }
    }
    REQUIRE(count > 1000.0);
    CHECK(hits / count >= 0.70);
    CHECK(hits / count <= 0.76);
    CHECK(design.theta0() == doctest::Approx(std::numbers::pi / 4));
}

TEST_CASE("laplace golden fixture") {
    const Dataset golden = load_csv(fs::path(SMSCORE_TEST_DATA) / "laplace_n10_seed3.csv");
    const Dataset fresh = gen_dataset(SimDesign::of(XDist::Laplace), 10, 3);
    CHECK(fresh.y == golden.y);
    CHECK(fresh.x == golden.x);
}

TEST_CASE("csv parse") {
    const fs::path p = write_text("two.csv", "y,x1,x2\n1,0.5,-0.2\n0,-1.0,0.3\n");
    const Dataset data = load_csv(p);
    CHECK(data.n() == 2);
    CHECK(data.d() == 2);
    CHECK(data.y[0] == 1);
    CHECK(data.x(1, 0) == -1.0);
    CHECK(data.x(0, 1) == -0.2);
    CHECK(std::holds_alternative<FileSource>(data.source));
    // Estimation needs n >= d + 1.
    CHECK_THROWS_AS(validate_for_estimation(data), InsufficientDataError);
}

TEST_CASE("csv round trip") {
    const Dataset data = gen_dataset(SimDesign::of(XDist::Normal), 100, 9);
    const fs::path p = scratch("round.csv");
    write_csv(data, p);
    const Dataset back = load_csv(p);
    CHECK(back.y == data.y);
    CHECK(back.x == data.x);
}

TEST_CASE("csv errors") {
    CHECK_THROWS_AS(load_csv(scratch("does_not_exist.csv")), FormatError);
    CHECK_THROWS_AS(load_csv(write_text("nohead.csv", "1,0.5,0.2\n0,1,2\n1,3,4\n")), FormatError);
    CHECK_THROWS_AS(load_csv(write_text("empty.csv", "")), FormatError);
    CHECK_THROWS_AS(load_csv(write_text("ragged.csv", "y,x1,x2\n1,0.5,0.2\n0,1\n1,3,4\n")), FormatError);
    CHECK_THROWS_AS(load_csv(write_text("nan.csv", "y,x1\n1,nan\n0,1\n")), DomainError);
    CHECK_THROWS_AS(load_csv(write_text("text.csv", "y,x1\n1,abc\n0,1\n")), DomainError);
    CHECK_THROWS_AS(load_csv(write_text("rows.csv", "y,x1,x2,x3\n1,1,2,3\n0,3,4,5\n")), InsufficientDataError);
    CHECK_THROWS_AS(load_csv(write_text("norows.csv", "y,x1\n")), InsufficientDataError);

    try {
        load_csv(write_text("bad_y.csv", "y,x1,x2\n1,0.5,0.2\n0,1,2\n2,3,4\n"));
        FAIL("expected a domain error");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
        CHECK(e.module() == "dgp");
    }
}

TEST_CASE("estimation preconditions") {
    Dataset data = gen_dataset(SimDesign::of(XDist::Normal), 20, 2);
    CHECK_NOTHROW(validate_for_estimation(data));
    Dataset one_class = data;
    one_class.y.setOnes();
    CHECK_THROWS_AS(validate_for_estimation(one_class), DegenerateDataError);
    Dataset bad_y = data;
    bad_y.y[3] = 5;
    CHECK_THROWS_AS(validate_for_estimation(bad_y), DomainError);
    Dataset bad_shape = data;
    bad_shape.y.conservativeResize(10);
    CHECK_THROWS_AS(validate_for_estimation(bad_shape), ShapeError);
    Dataset inf_x = data;
    inf_x.x(0, 0) = INFINITY;
    CHECK_THROWS_AS(validate_for_estimation(inf_x), DomainError);
}

TEST_CASE("design names") {
    for (XDist d : {XDist::Normal, XDist::T5, XDist::Laplace}) CHECK(parse_xdist(xdist_name(d)) == d);
    CHECK_THROWS_AS(parse_xdist("cauchy"), ConfigError);
}

TEST_CASE("rng samplers") {
    Rng rng(2024);
    const int n = 400000;
    double su = 0, sn = 0, sn2 = 0, se = 0, sl2 = 0, sc = 0;
    double umin = 1, umax = 0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        umin = std::min(umin, u);
        umax = std::max(umax, u);
        su += u;
        const double z = rng.normal();
        sn += z;
        sn2 += z * z;
        se += rng.exponential();
        const double l = rng.logistic();
        sl2 += l * l;
    }
    for (int i = 0; i < n / 10; ++i) sc += rng.chi_squared(5);
    CHECK(umin > 0.0);
    CHECK(umax < 1.0);
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.005));
    CHECK(std::abs(sn / n) < 0.01);
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(se / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(sl2 / n == doctest::Approx(std::numbers::pi * std::numbers::pi / 3.0).epsilon(0.02));
    CHECK(sc / (n / 10) == doctest::Approx(5.0).epsilon(0.02));

    std::array<int, 7> counts{};
    for (int i = 0; i < 70000; ++i) ++counts[rng.below(7)];
    for (int c : counts) CHECK(std::abs(c - 10000) < 500);

    CHECK(mix_seed({1, 2}) != mix_seed({2, 1}));
    CHECK(mix_seed({1, 2}) == mix_seed({1, 2}));
    Rng a(9), b(9);
    for (int i = 0; i < 10; ++i) CHECK(a() == b());
}
