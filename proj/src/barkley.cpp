#include "pathwalk/models/barkley.hpp"

#include <cmath>
#include <stdexcept>

namespace pathwalk {

BarkleyModel::BarkleyModel(const SpatialGrid& grid, const BarkleyParams& params,
                           Eigen::VectorXd x0)
    : grid_(grid), params_(params), x0_(std::move(x0)) {
    if (!(params.r > 0.0) || !(params.sigma_noise > 0.0) || !(params.eps_u > 0.0) ||
        !(params.diff > 0.0) || !(params.u0 > 0.0) || !(params.kappa_b > 0.0))
        throw std::invalid_argument("barkley model: parameters must be positive");
    if (x0_.size() != 2 * grid.points)
        throw std::invalid_argument("barkley model: initial state has wrong layout");
}

double BarkleyModel::stable_dt() const {
    return 0.2 * grid_.dx * grid_.dx / std::max(params_.diff, 1.0);
}

void BarkleyModel::drift(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
    const int nx = grid_.points;
    const double inv_dx = 1.0 / grid_.dx;
    const double inv_dx2 = inv_dx * inv_dx;
    const auto q = x.head(nx);
    const auto u = x.tail(nx);
    out.resize(2 * nx);

    for (int j = 0; j < nx; ++j) {
        const int jm = (j + nx - 1) % nx;
        const int jp = (j + 1) % nx;

        const double aq = u[j] - params_.zeta;
        const double dq_up =
            aq > 0.0 ? (q[j] - q[jm]) * inv_dx : (q[jp] - q[j]) * inv_dx;
        const double qm1 = q[j] - 1.0;
        const double fr =
            q[j] * (params_.r + u[j] - params_.u0 - (params_.r + params_.delta) * qm1 * qm1);
        out[j] = -aq * dq_up + fr + params_.diff * (q[jp] - 2.0 * q[j] + q[jm]) * inv_dx2;

        const double du_up =
            u[j] > 0.0 ? (u[j] - u[jm]) * inv_dx : (u[jp] - u[j]) * inv_dx;
        out[nx + j] = -u[j] * du_up +
                      params_.eps_u * ((params_.u0 - u[j]) +
                                       params_.kappa_b * (params_.ubar - u[j]) * q[j]);
    }
}

void BarkleyModel::drift_jacT_apply(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                                    Eigen::VectorXd& out) const {
    const int nx = grid_.points;
    const double inv_dx = 1.0 / grid_.dx;
    const double cdiff = params_.diff * inv_dx * inv_dx;
    const auto q = x.head(nx);
    const auto u = x.tail(nx);
    const auto mq = mu.head(nx);
    const auto muu = mu.tail(nx);
    out.setZero(2 * nx);
    auto oq = out.head(nx);
    auto ou = out.tail(nx);

    // Scatter form of J^T: each forward dependence dq_j/dx_k contributes
    // out_k += (dq_j/dx_k) mu_j, with upwind branches frozen at x.
    for (int j = 0; j < nx; ++j) {
        const int jm = (j + nx - 1) % nx;
        const int jp = (j + 1) % nx;

        // q equation, advection -(u_j - zeta) * upwind(q)_j
        const double aq = u[j] - params_.zeta;
        if (aq > 0.0) {
            oq[j] -= aq * inv_dx * mq[j];
            oq[jm] += aq * inv_dx * mq[j];
            ou[j] -= (q[j] - q[jm]) * inv_dx * mq[j];
        } else {
            oq[jp] -= aq * inv_dx * mq[j];
            oq[j] += aq * inv_dx * mq[j];
            ou[j] -= (q[jp] - q[j]) * inv_dx * mq[j];
        }

        // q equation, reaction f_r
        const double qm1 = q[j] - 1.0;
        const double dfr_dq = (params_.r + u[j] - params_.u0 -
                               (params_.r + params_.delta) * qm1 * qm1) -
                              2.0 * (params_.r + params_.delta) * q[j] * qm1;
        oq[j] += dfr_dq * mq[j];
        ou[j] += q[j] * mq[j];

        // q equation, diffusion (symmetric stencil)
        oq[jp] += cdiff * mq[j];
        oq[j] -= 2.0 * cdiff * mq[j];
        oq[jm] += cdiff * mq[j];

        // u equation, advection -u_j * upwind(u)_j
        if (u[j] > 0.0) {
            ou[j] -= (u[j] - u[jm]) * inv_dx * muu[j];
            ou[j] -= u[j] * inv_dx * muu[j];
            ou[jm] += u[j] * inv_dx * muu[j];
        } else {
            ou[j] -= (u[jp] - u[j]) * inv_dx * muu[j];
            ou[jp] -= u[j] * inv_dx * muu[j];
            ou[j] += u[j] * inv_dx * muu[j];
        }

        // u equation, relaxation
        ou[j] += params_.eps_u * (-1.0 - params_.kappa_b * q[j]) * muu[j];
        oq[j] += params_.eps_u * params_.kappa_b * (params_.ubar - u[j]) * muu[j];
    }
}

void BarkleyModel::diffusion_apply(const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                                   Eigen::VectorXd& out) const {
    const int nx = grid_.points;
    const double c = params_.sigma_noise / std::sqrt(grid_.dx);
    out.setZero(2 * nx);
    out.head(nx) = c * x.head(nx).cwiseProduct(w);
}

void BarkleyModel::diffusion_T_apply(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                     Eigen::VectorXd& out) const {
    const int nx = grid_.points;
    const double c = params_.sigma_noise / std::sqrt(grid_.dx);
    out = c * x.head(nx).cwiseProduct(u.head(nx));
}

void BarkleyModel::diffusion_state_jacT_apply(const Eigen::VectorXd&, const Eigen::VectorXd& w,
                                              const Eigen::VectorXd& u,
                                              Eigen::VectorXd& out) const {
    const int nx = grid_.points;
    const double c = params_.sigma_noise / std::sqrt(grid_.dx);
    out.setZero(2 * nx);
    out.head(nx) = c * w.cwiseProduct(u.head(nx));
}

Eigen::VectorXd puff_initial_condition(const SpatialGrid& grid, double u0, double ubar,
                                       double q_peak) {
    const double lo = 15.0, hi = 30.0;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2 * grid.points);
    for (int j = 0; j < grid.points; ++j) {
        const double s = (grid.x(j) - mid) / half;
        double bump = 0.0;
        if (std::abs(s) < 1.0) bump = std::exp(1.0 - 1.0 / (1.0 - s * s));
        x0[j] = q_peak * bump;
        // inside the puff u relaxes toward the turbulent balance
        x0[grid.points + j] = u0 - 0.6 * (u0 - ubar) * bump;
    }
    return x0;
}

std::unique_ptr<Model> barkley_model(const SpatialGrid& grid, const BarkleyParams& params) {
    return std::make_unique<BarkleyModel>(grid, params,
                                          puff_initial_condition(grid, params.u0, params.ubar));
}

std::unique_ptr<Model> barkley_model(const SpatialGrid& grid, const BarkleyParams& params,
                                     Eigen::VectorXd x0) {
    return std::make_unique<BarkleyModel>(grid, params, std::move(x0));
}

}  // namespace pathwalk
