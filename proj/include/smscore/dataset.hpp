#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>

#include <Eigen/Core>

namespace smscore {

enum class XDist { Normal, T5, Laplace };

// Threshold-crossing design Y = 1{X'b0 + eps >= 0} with eps ~ Logistic(0, 1)
// and X an elliptical scale mixture of N(0, sigma).
struct SimDesign {
    XDist xdist = XDist::Normal;
    Eigen::Matrix2d sigma{{1.0, 0.5}, {0.5, 1.0}};
    Eigen::Vector2d b0 = Eigen::Vector2d::Constant(1.0 / std::sqrt(2.0));

    static SimDesign of(XDist xdist) {
        SimDesign d;
        d.xdist = xdist;
        return d;
    }

    // Angle of b0.
    double theta0() const { return std::atan2(b0[1], b0[0]); }
};

// CLI names: "normal", "t5", "laplace".
XDist parse_xdist(const std::string& name);
std::string xdist_name(XDist xdist);

struct SyntheticSource {
    XDist xdist;
    std::uint64_t seed;
};

struct FileSource {
    std::filesystem::path path;
};

using DataSource = std::variant<SyntheticSource, FileSource>;

struct Dataset {
    Eigen::VectorXi y;  // 0 or 1
    Eigen::MatrixXd x;  // n x d
    DataSource source = FileSource{};

    Eigen::Index n() const { return x.rows(); }
    Eigen::Index d() const { return x.cols(); }
};

// Throws unless y is binary with both classes present, the shapes agree and
// n >= d + 1. Collinearity is checked by the estimator.
void validate_for_estimation(const Dataset& data);

// Header "y,x1,...,xd"; one observation per line.
Dataset load_csv(const std::filesystem::path& path);
void write_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace smscore
