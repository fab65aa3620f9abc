#pragma once

#include <Eigen/Dense>

namespace pathwalk {

// Contract for the controlled dynamics
//
//     x_{i+1} = x_i + b(x_i) dt + sigma(x_i) z_i sqrt(dt),
//
// bundling the drift b, the diffusion action sigma(x) w, and the exact
// transpose actions the adjoint sweep needs. Implementations must be
// reentrant: no interior mutability, so chains can share one instance.
// m < n (degenerate noise) is fully supported; nothing here inverts
// sigma sigma^T.
class Model {
  public:
    virtual ~Model() = default;

    virtual int state_dim() const = 0;   // n
    virtual int noise_dim() const = 0;   // m
    virtual Eigen::VectorXd initial_state() const = 0;

    // b(x)
    virtual void drift(const Eigen::VectorXd& x, Eigen::VectorXd& out) const = 0;

    // grad b(x)^T mu
    virtual void drift_jacT_apply(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                                  Eigen::VectorXd& out) const = 0;

    // sigma(x) w, w of length m
    virtual void diffusion_apply(const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                                 Eigen::VectorXd& out) const = 0;

    // sigma(x)^T u, u of length n
    virtual void diffusion_T_apply(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                   Eigen::VectorXd& out) const = 0;

    // (d/dx)[sigma(x) w]^T u; identically zero for additive noise.
    virtual void diffusion_state_jacT_apply(const Eigen::VectorXd& /*x*/,
                                            const Eigen::VectorXd& /*w*/,
                                            const Eigen::VectorXd& /*u*/,
                                            Eigen::VectorXd& out) const {
        out.setZero();
    }

    virtual bool additive_noise() const { return true; }

    // True when the noise-to-path map is affine (linear drift, constant
    // diffusion). Together with a linear observable this flags a flat
    // constraint manifold, which unlocks the pCN proposal.
    virtual bool affine_flow() const { return false; }
};

}  // namespace pathwalk
