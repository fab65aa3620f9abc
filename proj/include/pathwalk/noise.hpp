#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "pathwalk/grid.hpp"
#include "pathwalk/rng.hpp"

namespace pathwalk {

// Standardized noise coordinates z, shape N_t x m. Under the prior every
// entry is an independent standard normal. The physical noise is
// eta_i = z_i / sqrt(dt), which makes the Euclidean inner product on z
// equal to the L^2([0,T]) inner product on eta at every resolution.
struct NoiseVector {
    Eigen::MatrixXd values;  // N_t rows, m columns
    TimeGrid grid;

    int steps() const { return static_cast<int>(values.rows()); }
    int noise_dim() const { return static_cast<int>(values.cols()); }

    NoiseVector same_shape_zero() const {
        NoiseVector out;
        out.values = Eigen::MatrixXd::Zero(values.rows(), values.cols());
        out.grid = grid;
        return out;
    }
};

inline NoiseVector sample_prior(const TimeGrid& grid, int noise_dim, RandomStream& rng) {
    NoiseVector z;
    z.grid = grid;
    z.values.resize(grid.steps, noise_dim);
    for (int i = 0; i < grid.steps; ++i)
        for (int j = 0; j < noise_dim; ++j)
            z.values(i, j) = rng.normal();
    return z;
}

inline double inner(const NoiseVector& a, const NoiseVector& b) {
    if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols() ||
        !(a.grid == b.grid))
        throw std::invalid_argument("inner: noise vectors have mismatched shape or grid");
    return (a.values.array() * b.values.array()).sum();
}

// Unnormalized: the Gaussian constant cancels in every acceptance ratio.
inline double log_prior_density(const NoiseVector& z) { return -0.5 * inner(z, z); }

}  // namespace pathwalk
