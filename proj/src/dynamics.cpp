#include "pathwalk/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "pathwalk/errors.hpp"

namespace pathwalk {

StatePath integrate_forward(const Model& model, const NoiseVector& z) {
    const int n = model.state_dim();
    const int m = model.noise_dim();
    if (z.noise_dim() != m)
        throw std::invalid_argument("integrate_forward: noise dimension does not match model");

    const int nt = z.steps();
    const double dt = z.grid.dt;
    const double sqdt = std::sqrt(dt);

    StatePath path;
    path.grid = z.grid;
    path.states.resize(nt + 1, n);

    Eigen::VectorXd x = model.initial_state();
    Eigen::VectorXd b(n), sw(n), w(m);
    path.states.row(0) = x.transpose();

    for (int i = 0; i < nt; ++i) {
        model.drift(x, b);
        w = z.values.row(i).transpose();
        model.diffusion_apply(x, w, sw);
        x += dt * b + sqdt * sw;
        if (!x.allFinite()) throw IntegrationDiverged(i);
        path.states.row(i + 1) = x.transpose();
    }
    return path;
}

AdjointResult adjoint_gradient(const Model& model, const Observable& obs, const NoiseVector& z) {
    AdjointResult res;
    res.path = integrate_forward(model, z);
    res.value = obs.value(res.path);

    const Eigen::MatrixXd grad = obs.state_gradient(res.path);
    const int n = model.state_dim();
    const int m = model.noise_dim();
    const int nt = z.steps();
    const double dt = z.grid.dt;
    const double sqdt = std::sqrt(dt);

    res.normal.grid = z.grid;
    res.normal.values.resize(nt, m);

    Eigen::VectorXd mu = grad.row(nt).transpose();
    Eigen::VectorXd x(n), w(m), sTmu(m), jac_term(n), sjac_term(n);
    for (int i = nt - 1; i >= 0; --i) {
        x = res.path.states.row(i).transpose();
        w = z.values.row(i).transpose();

        model.diffusion_T_apply(x, mu, sTmu);
        res.normal.values.row(i) = sqdt * sTmu.transpose();

        model.drift_jacT_apply(x, mu, jac_term);
        if (model.additive_noise()) {
            mu += dt * jac_term;
        } else {
            model.diffusion_state_jacT_apply(x, w, mu, sjac_term);
            mu += dt * jac_term + sqdt * sjac_term;
        }
        if (i > 0) mu += grad.row(i).transpose();
    }
    return res;
}

NoiseVector fd_gradient(const Model& model, const Observable& obs, const NoiseVector& z,
                        double h) {
    if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: step size must be positive");

    NoiseVector g = z.same_shape_zero();
    NoiseVector zp = z;
    for (int i = 0; i < z.steps(); ++i) {
        for (int j = 0; j < z.noise_dim(); ++j) {
            const double orig = z.values(i, j);
            zp.values(i, j) = orig + h;
            const double fp = obs.value(integrate_forward(model, zp));
            zp.values(i, j) = orig - h;
            const double fm = obs.value(integrate_forward(model, zp));
            zp.values(i, j) = orig;
            g.values(i, j) = (fp - fm) / (2.0 * h);
        }
    }
    return g;
}

// Per-entry relative discrepancy with a floor tied to the gradient scale,
// so near-zero entries do not blow up the quotient.
static double normalized_discrepancy(const Eigen::MatrixXd& adj, const Eigen::MatrixXd& fd) {
    const double scale = adj.cwiseAbs().maxCoeff();
    if (scale == 0.0) return fd.cwiseAbs().maxCoeff();
    double worst = 0.0;
    for (int i = 0; i < adj.rows(); ++i)
        for (int j = 0; j < adj.cols(); ++j) {
            const double denom = std::max(std::abs(adj(i, j)), 1e-3 * scale);
            worst = std::max(worst, std::abs(adj(i, j) - fd(i, j)) / denom);
        }
    return worst;
}

GradientCheckReport gradient_check(const Model& model, const Observable& obs, int trials,
                                   const TimeGrid& grid, RandomStream& rng, double h) {
    GradientCheckReport report;
    report.trials = trials;
    for (int t = 0; t < trials; ++t) {
        NoiseVector z = sample_prior(grid, model.noise_dim(), rng);
        const AdjointResult adj = adjoint_gradient(model, obs, z);
        const NoiseVector fd = fd_gradient(model, obs, z, h);
        const double d = normalized_discrepancy(adj.normal.values, fd.values);
        if (!std::isfinite(d)) report.all_finite = false;
        report.max_rel_error = std::max(report.max_rel_error, d);
    }
    return report;
}

}  // namespace pathwalk
