#pragma once

#include <memory>

#include "pathwalk/grid.hpp"
#include "pathwalk/model.hpp"

namespace pathwalk {

// Parameters of the stochastic pipe-flow model. r plays the role of the
// Reynolds number; everything else follows the standard calibration and
// is exposed for override.
struct BarkleyParams {
    double r = 0.7;            // Reynolds-like control parameter
    double sigma_noise = 0.25; // multiplicative noise amplitude on q
    double zeta = 0.8;         // advection offset of q relative to u
    double delta = 0.1;        // excitability width in f_r
    double eps_u = 0.04;       // u relaxation rate
    double kappa_b = 4.0;      // coupling of u to q
    double u0 = 1.0;           // laminar mean shear
    double ubar = 0.2;         // turbulent mean shear target
    double diff = 0.5;         // diffusion of q

    // Localized puffs require the depleted shear to fall below u0 - r so
    // that space-filling turbulence cannot self-sustain; the calibration
    // above yields metastable puffs with mass near 25 at r = 0.7.
};

// Two-species reaction-advection-diffusion model of subcritical pipe flow:
//
//     dq/dt + (u - zeta) q_x = f_r(q, u) + D q_xx + sigma q eta
//     du/dt + u u_x = eps_u [ (U0 - u) + kappa_b (Ubar - u) q ]
//
// with f_r(q, u) = q (r + u - U0 - (r + delta)(q - 1)^2). State layout is
// (q_0..q_{Nx-1}, u_0..u_{Nx-1}); the noise acts on q only (m = Nx < n),
// multiplicatively and scaled by 1/sqrt(dx) so the discrete forcing
// approximates delta-correlated spatial white noise. Advection is
// first-order upwind, diffusion periodic central differences.
class BarkleyModel final : public Model {
  public:
    BarkleyModel(const SpatialGrid& grid, const BarkleyParams& params, Eigen::VectorXd x0);

    int state_dim() const override { return 2 * grid_.points; }
    int noise_dim() const override { return grid_.points; }
    Eigen::VectorXd initial_state() const override { return x0_; }

    void drift(const Eigen::VectorXd& x, Eigen::VectorXd& out) const override;
    void drift_jacT_apply(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                          Eigen::VectorXd& out) const override;
    void diffusion_apply(const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                         Eigen::VectorXd& out) const override;
    void diffusion_T_apply(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                           Eigen::VectorXd& out) const override;
    void diffusion_state_jacT_apply(const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                                    const Eigen::VectorXd& u, Eigen::VectorXd& out) const override;
    bool additive_noise() const override { return false; }

    const SpatialGrid& grid() const { return grid_; }
    const BarkleyParams& params() const { return params_; }

    // Conservative explicit-step bound dt <= 0.2 dx^2 / max(D, 1).
    double stable_dt() const;

  private:
    SpatialGrid grid_;
    BarkleyParams params_;
    Eigen::VectorXd x0_;
};

// Smooth compactly supported turbulent puff in x in [15, 30]: q is a
// C-infinity bump with peak q_peak, u is U0 outside and depressed toward
// the turbulent branch inside.
Eigen::VectorXd puff_initial_condition(const SpatialGrid& grid, double u0 = 1.0,
                                       double ubar = 0.5, double q_peak = 1.5);

std::unique_ptr<Model> barkley_model(const SpatialGrid& grid, const BarkleyParams& params);
std::unique_ptr<Model> barkley_model(const SpatialGrid& grid, const BarkleyParams& params,
                                     Eigen::VectorXd x0);

}  // namespace pathwalk
