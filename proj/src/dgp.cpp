#include "smscore/dgp.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "smscore/error.hpp"

namespace smscore {

Eigen::MatrixX2d sample_x(const SimDesign& design, Eigen::Index n, std::uint64_t seed) {
    if (n < 1) throw ConfigError("dgp", "sample size must be positive");
    Eigen::LLT<Eigen::Matrix2d> llt(design.sigma);
    if (llt.info() != Eigen::Success)
        throw ConfigError("dgp", "design covariance is not positive definite");
    const Eigen::Matrix2d chol = llt.matrixL();

    Rng rng(seed);
    Eigen::MatrixX2d x(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Vector2d z;
        z[0] = rng.normal();
        z[1] = rng.normal();
        Eigen::Vector2d row = chol * z;
        switch (design.xdist) {
            case XDist::Normal: break;
            case XDist::T5: row /= std::sqrt(rng.chi_squared(5) / 5.0); break;
            case XDist::Laplace: row *= std::sqrt(rng.exponential()); break;
        }
        x.row(i) = row.transpose();
    }
    return x;
}

Dataset gen_dataset(const SimDesign& design, Eigen::Index n, SubSeeds seeds) {
    Dataset data;
    data.x = sample_x(design, n, seeds.x);
    data.y.resize(n);
    Rng eps(seeds.eps);
    const Eigen::VectorXd index = data.x * design.b0;
    for (Eigen::Index i = 0; i < n; ++i) data.y[i] = index[i] + eps.logistic() >= 0.0 ? 1 : 0;
    data.source = SyntheticSource{design.xdist, seeds.x};
    return data;
}

Dataset gen_dataset(const SimDesign& design, Eigen::Index n, std::uint64_t seed) {
    Dataset data = gen_dataset(design, n, SubSeeds::from(seed));
    data.source = SyntheticSource{design.xdist, seed};
    return data;
}

}  // namespace smscore
