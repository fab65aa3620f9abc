#pragma once

#include <Eigen/Dense>

#include "pathwalk/model.hpp"
#include "pathwalk/noise.hpp"
#include "pathwalk/observable.hpp"
#include "pathwalk/path.hpp"
#include "pathwalk/rng.hpp"

namespace pathwalk {

// Explicit Euler-Maruyama: x_{i+1} = x_i + b(x_i) dt + sigma(x_i) z_i sqrt(dt).
// Throws IntegrationDiverged on the first non-finite state.
StatePath integrate_forward(const Model& model, const NoiseVector& z);

struct AdjointResult {
    double value = 0.0;   // F(z)
    NoiseVector normal;   // exact discrete gradient dF/dz, same shape as z
    StatePath path;       // the forward trajectory

    double normal_norm() const { return std::sqrt(inner(normal, normal)); }
};

// Exact gradient of the discrete map z -> f(path(z)), computed by the
// backward recursion adjoint to the Euler-Maruyama step:
//
//     mu_N = g_N
//     normal_i = sqrt(dt) sigma(x_i)^T mu_{i+1}
//     mu_i = mu_{i+1} + dt grad b(x_i)^T mu_{i+1}
//                     + sqrt(dt) (d/dx)[sigma(x_i) z_i]^T mu_{i+1} + g_i
//
// This is discretize-then-differentiate: the manifold is defined by the
// discrete F, so Newton projection needs this gradient and not an
// O(dt)-accurate discretization of the continuum adjoint equation.
AdjointResult adjoint_gradient(const Model& model, const Observable& obs, const NoiseVector& z);

// Central finite differences of F entrywise; 2 N_t m forward solves, so
// intended for small grids only. Test oracle for adjoint_gradient.
NoiseVector fd_gradient(const Model& model, const Observable& obs, const NoiseVector& z, double h);

struct GradientCheckReport {
    int trials = 0;
    double max_rel_error = 0.0;   // max over trials of the normalized discrepancy
    bool all_finite = true;
};

// Max discrepancy between adjoint_gradient and fd_gradient over random
// prior draws, normalized per entry by |adjoint_i| with a floor at a small
// fraction of the gradient's sup norm. Non-finite values are reported in
// the flag, never thrown.
GradientCheckReport gradient_check(const Model& model, const Observable& obs, int trials,
                                   const TimeGrid& grid, RandomStream& rng, double h = 1e-5);

}  // namespace pathwalk
