#pragma once

#include <Eigen/Dense>

#include "pathwalk/path.hpp"

namespace pathwalk {

// Trajectory functional f(phi) together with its exact per-timestep state
// gradient g_i = df/dx_i, consumed as source terms by the adjoint sweep.
// Row 0 of the gradient must be returned as zero: x_0 is fixed and the
// sweep never reads it.
class Observable {
  public:
    virtual ~Observable() = default;

    virtual double value(const StatePath& path) const = 0;

    // Shape (N_t + 1) x n.
    virtual Eigen::MatrixXd state_gradient(const StatePath& path) const = 0;

    // True for functionals linear in the path; with an affine model this
    // makes the constraint manifold a hyperplane.
    virtual bool linear() const { return false; }

    // Throws invalid_argument when the observable cannot act on states of
    // dimension n. Called by config validation before any compute.
    virtual void validate_state_dim(int n) const = 0;

    // Optional per-timestep scalar trace (e.g. the running integrand) for
    // recording; empty when the observable has no natural trace.
    virtual Eigen::VectorXd trace(const StatePath& /*path*/) const { return {}; }
};

}  // namespace pathwalk
