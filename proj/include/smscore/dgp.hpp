#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "smscore/dataset.hpp"
#include "smscore/rng.hpp"

namespace smscore {

// Independent streams for the regressors and the latent errors.
struct SubSeeds {
    std::uint64_t x;
    std::uint64_t eps;

    static SubSeeds from(std::uint64_t master) {
        return {mix_seed({master, 0}), mix_seed({master, 1})};
    }
};

// n i.i.d. rows. Each row is L z with L the lower Cholesky factor of sigma and
// z standard normal, then scaled by 1/sqrt(U/5), U ~ chi2(5) (T5) or by sqrt(S),
// S ~ Exp(1) (Laplace). Draw order per row: z1, z2, mixing variable.
Eigen::MatrixX2d sample_x(const SimDesign& design, Eigen::Index n, std::uint64_t seed);

// Dataset with X from SubSeeds::from(seed).x and eps from SubSeeds::from(seed).eps.
Dataset gen_dataset(const SimDesign& design, Eigen::Index n, std::uint64_t seed);
Dataset gen_dataset(const SimDesign& design, Eigen::Index n, SubSeeds seeds);

}  // namespace smscore
