#include "pathwalk/models/kdv.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace pathwalk {

namespace {

// First column of the circulant differentiation matrix of order p:
// inverse DFT of the eigenvalues (i k)^p. The Nyquist mode is zeroed for
// odd p so the operator stays real and exactly (anti)symmetric.
std::vector<double> circulant_column(int n, double length, int order) {
    using cd = std::complex<double>;
    const double k0 = 2.0 * std::numbers::pi / length;
    std::vector<cd> lambda(n);
    for (int j = 0; j < n; ++j) {
        int mode = j <= n / 2 ? j : j - n;
        if (order % 2 == 1 && j == n / 2) mode = 0;
        lambda[j] = std::pow(cd(0.0, k0 * mode), order);
    }
    std::vector<double> col(n);
    for (int r = 0; r < n; ++r) {
        cd acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double angle = 2.0 * std::numbers::pi * j * r / n;
            acc += lambda[j] * cd(std::cos(angle), std::sin(angle));
        }
        col[r] = acc.real() / n;
    }
    return col;
}

Eigen::MatrixXd differentiation_matrix(int n, double length, int order) {
    const std::vector<double> col = circulant_column(n, length, order);
    Eigen::MatrixXd d(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) d(r, c) = col[(r - c + n) % n];
    // enforce the exact structure so transposes are exact algebraic adjoints
    if (order % 2 == 1)
        d = 0.5 * (d - d.transpose()).eval();
    else
        d = 0.5 * (d + d.transpose()).eval();
    return d;
}

}  // namespace

KdvModel::KdvModel(const SpatialGrid& grid, double kappa, double alpha_diff)
    : grid_(grid), kappa_(kappa), alpha_diff_(alpha_diff) {
    if (!(kappa > 0.0) || !(alpha_diff > 0.0))
        throw std::invalid_argument("kdv model: kappa and alpha_diff must be positive");
    if (grid.points % 2 != 0)
        throw std::invalid_argument("kdv model: spectral derivative needs an even grid");

    d1_ = differentiation_matrix(grid.points, grid.length, 1);
    d2_ = differentiation_matrix(grid.points, grid.length, 2);
    d3_ = differentiation_matrix(grid.points, grid.length, 3);

    const double k0 = 2.0 * std::numbers::pi / grid.length;
    force_cos_.resize(grid.points);
    force_sin_.resize(grid.points);
    for (int j = 0; j < grid.points; ++j) {
        force_cos_[j] = std::cos(k0 * grid.x(j));
        force_sin_[j] = std::sin(k0 * grid.x(j));
    }
}

void KdvModel::drift(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
    out.noalias() = kappa_ * (d3_ * x);
    out.noalias() += alpha_diff_ * (d2_ * x);
    out.array() -= x.array() * (d1_ * x).array();
}

void KdvModel::drift_jacT_apply(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                                Eigen::VectorXd& out) const {
    // J = kappa D3 + alpha D2 - diag(D1 x) - diag(x) D1
    out.noalias() = kappa_ * (d3_.transpose() * mu);
    out.noalias() += alpha_diff_ * (d2_.transpose() * mu);
    out.array() -= (d1_ * x).array() * mu.array();
    out.noalias() -= d1_.transpose() * x.cwiseProduct(mu);
}

void KdvModel::diffusion_apply(const Eigen::VectorXd&, const Eigen::VectorXd& w,
                               Eigen::VectorXd& out) const {
    out = w[0] * force_cos_ + w[1] * force_sin_;
}

void KdvModel::diffusion_T_apply(const Eigen::VectorXd&, const Eigen::VectorXd& u,
                                 Eigen::VectorXd& out) const {
    out.resize(2);
    out[0] = force_cos_.dot(u);
    out[1] = force_sin_.dot(u);
}

std::unique_ptr<Model> kdv_model(const SpatialGrid& grid, double kappa, double alpha_diff) {
    return std::make_unique<KdvModel>(grid, kappa, alpha_diff);
}

}  // namespace pathwalk
