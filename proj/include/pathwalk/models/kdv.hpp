#pragma once

#include <memory>

#include "pathwalk/grid.hpp"
#include "pathwalk/model.hpp"

namespace pathwalk {

// Stochastic Korteweg-de Vries on a periodic domain,
//
//     d phi = (kappa phi_xxx + alpha phi_xx - phi phi_x) dt + sigma dW,
//
// with the forcing confined to the largest Fourier mode k = 2 pi / L:
// sigma w = w_1 cos(k x) + w_2 sin(k x), so m = 2 and the spatial
// covariance is cos(k (x - x')). Spatial derivatives are dense Fourier
// differentiation matrices with their symmetry (D2) and antisymmetry
// (D1, D3) enforced exactly, which makes the adjoint a plain transpose
// and keeps sum_j drift_j at rounding level.
class KdvModel final : public Model {
  public:
    KdvModel(const SpatialGrid& grid, double kappa, double alpha_diff);

    int state_dim() const override { return grid_.points; }
    int noise_dim() const override { return 2; }
    Eigen::VectorXd initial_state() const override {
        return Eigen::VectorXd::Zero(grid_.points);
    }

    void drift(const Eigen::VectorXd& x, Eigen::VectorXd& out) const override;
    void drift_jacT_apply(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                          Eigen::VectorXd& out) const override;
    void diffusion_apply(const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                         Eigen::VectorXd& out) const override;
    void diffusion_T_apply(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                           Eigen::VectorXd& out) const override;

    const SpatialGrid& grid() const { return grid_; }

  private:
    SpatialGrid grid_;
    double kappa_;
    double alpha_diff_;
    Eigen::MatrixXd d1_, d2_, d3_;      // spectral d/dx, d2/dx2, d3/dx3
    Eigen::VectorXd force_cos_, force_sin_;
};

std::unique_ptr<Model> kdv_model(const SpatialGrid& grid, double kappa, double alpha_diff);

}  // namespace pathwalk
