#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pathwalk/dynamics.hpp"
#include "pathwalk/errors.hpp"
#include "pathwalk/models/brownian.hpp"
#include "pathwalk/models/ou.hpp"
#include "pathwalk/observables.hpp"

using namespace pathwalk;

namespace {

// Drift that blows up in finite time, to exercise the divergence guard.
class ExplodingModel final : public Model {
  public:
    int state_dim() const override { return 1; }
    int noise_dim() const override { return 1; }
    Eigen::VectorXd initial_state() const override { return Eigen::VectorXd::Ones(1); }
    void drift(const Eigen::VectorXd& x, Eigen::VectorXd& out) const override {
        out[0] = x[0] * x[0] * x[0] * 1e8;
    }
    void drift_jacT_apply(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                          Eigen::VectorXd& out) const override {
        out[0] = 3e8 * x[0] * x[0] * mu[0];
    }
    void diffusion_apply(const Eigen::VectorXd&, const Eigen::VectorXd& w,
                         Eigen::VectorXd& out) const override {
        out = w;
    }
    void diffusion_T_apply(const Eigen::VectorXd&, const Eigen::VectorXd& u,
                           Eigen::VectorXd& out) const override {
        out = u;
    }
};

}  // namespace

TEST_CASE("forward integration of OU by hand") {
    // b(x) = -x, sigma = sqrt(eps), z = 0, x0 = 1, dt = 0.5:
    // x_{i+1} = x_i (1 - dt) -> 1, 0.5, 0.25
    class ShiftedOu final : public Model {
      public:
        int state_dim() const override { return 1; }
        int noise_dim() const override { return 1; }
        Eigen::VectorXd initial_state() const override { return Eigen::VectorXd::Ones(1); }
        void drift(const Eigen::VectorXd& x, Eigen::VectorXd& out) const override { out = -x; }
        void drift_jacT_apply(const Eigen::VectorXd&, const Eigen::VectorXd& mu,
                              Eigen::VectorXd& out) const override {
            out = -mu;
        }
        void diffusion_apply(const Eigen::VectorXd&, const Eigen::VectorXd& w,
                             Eigen::VectorXd& out) const override {
            out = w;
        }
        void diffusion_T_apply(const Eigen::VectorXd&, const Eigen::VectorXd& u,
                               Eigen::VectorXd& out) const override {
            out = u;
        }
    } model;

    NoiseVector z{Eigen::MatrixXd::Zero(2, 1), make_grid(1.0, 2)};
    const StatePath path = integrate_forward(model, z);
    CHECK(path.states(0, 0) == doctest::Approx(1.0));
    CHECK(path.states(1, 0) == doctest::Approx(0.5));
    CHECK(path.states(2, 0) == doctest::Approx(0.25));
}

TEST_CASE("forward integration of pure noise accumulates increments") {
    const auto model = brownian_model(1);
    RandomStream rng(3);
    const TimeGrid grid = make_grid(1.0, 16);
    const NoiseVector z = sample_prior(grid, 1, rng);
    const StatePath path = integrate_forward(*model, z);
    const double sqdt = std::sqrt(grid.dt);
    for (int i = 0; i < 16; ++i)
        CHECK(path.states(i + 1, 0) - path.states(i, 0) ==
              doctest::Approx(z.values(i, 0) * sqdt));
}

TEST_CASE("OU stays at the fixed point with zero noise") {
    const auto model = ou_model(0.5);
    NoiseVector z{Eigen::MatrixXd::Zero(8, 1), make_grid(1.0, 8)};
    const StatePath path = integrate_forward(*model, z);
    CHECK(path.states.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("divergence reports the failing step") {
    ExplodingModel model;
    NoiseVector z{Eigen::MatrixXd::Zero(64, 1), make_grid(1.0, 64)};
    CHECK_THROWS_AS(integrate_forward(model, z), IntegrationDiverged);
}

TEST_CASE("adjoint of Brownian endpoint is sqrt(dt) everywhere") {
    const auto model = brownian_model(1);
    const auto obs = endpoint_observable(0);
    RandomStream rng(4);
    const TimeGrid grid = make_grid(1.0, 32);
    const NoiseVector z = sample_prior(grid, 1, rng);
    const AdjointResult adj = adjoint_gradient(*model, *obs, z);
    const double sqdt = std::sqrt(grid.dt);
    CHECK(adj.normal.values.rows() == 32);
    for (int i = 0; i < 32; ++i) CHECK(adj.normal.values(i, 0) == doctest::Approx(sqdt));
    // and it agrees with finite differences to rounding (the map is linear)
    const NoiseVector fd = fd_gradient(*model, *obs, z, 1e-5);
    CHECK((adj.normal.values - fd.values).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("adjoint matches finite differences for OU with integral observable") {
    const auto model = ou_model(0.1);
    RandomStream rng(6);
    const TimeGrid grid = make_grid(1.0, 16);
    for (double alpha : {1.0, 3.0}) {
        const auto obs = power_mean_observable(alpha);
        const NoiseVector z = sample_prior(grid, 1, rng);
        const AdjointResult adj = adjoint_gradient(*model, *obs, z);
        const NoiseVector fd = fd_gradient(*model, *obs, z, 1e-5);
        const double scale = adj.normal.values.cwiseAbs().maxCoeff();
        CHECK((adj.normal.values - fd.values).cwiseAbs().maxCoeff() < 1e-5 * scale);
    }
}

TEST_CASE("adjoint vanishes at the stationary zero path") {
    const auto model = ou_model(0.1);
    const auto obs = power_mean_observable(3.0);
    NoiseVector z{Eigen::MatrixXd::Zero(16, 1), make_grid(1.0, 16)};
    const AdjointResult adj = adjoint_gradient(*model, *obs, z);
    CHECK(adj.value == 0.0);
    CHECK(adj.normal.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fd_gradient rejects a zero step") {
    const auto model = brownian_model(1);
    const auto obs = endpoint_observable(0);
    NoiseVector z{Eigen::MatrixXd::Zero(4, 1), make_grid(1.0, 4)};
    CHECK_THROWS_AS(fd_gradient(*model, *obs, z, 0.0), std::invalid_argument);
}

TEST_CASE("directional derivative test, discretize-then-differentiate exactness") {
    // cubic integrand so the central difference has a visible O(eps^2) term
    const auto model = ou_model(0.2);
    const auto obs = power_mean_observable(3.0);
    RandomStream rng(8);
    const TimeGrid grid = make_grid(1.0, 24);
    const NoiseVector z = sample_prior(grid, 1, rng);
    const AdjointResult adj = adjoint_gradient(*model, *obs, z);

    NoiseVector u = sample_prior(grid, 1, rng);
    u.values /= std::sqrt(inner(u, u));
    const double directional = inner(adj.normal, u);

    // |(F(z+eps u) - F(z-eps u)) / (2 eps) - <normal, u>| = O(eps^2)
    const auto fd_error = [&](double eps) {
        NoiseVector zp = z, zm = z;
        zp.values += eps * u.values;
        zm.values -= eps * u.values;
        const double fp = obs->value(integrate_forward(*model, zp));
        const double fm = obs->value(integrate_forward(*model, zm));
        return std::abs((fp - fm) / (2 * eps) - directional);
    };
    const double coarse = fd_error(1e-2);
    const double fine = fd_error(1e-3);
    CHECK(fine < coarse);
    CHECK(fine / coarse < 0.05);  // quadratic shrinkage, allowing slack
    CHECK(fine < 1e-7);
}

TEST_CASE("adjoint pairing of diffusion actions") {
    // <sigma(x) w, u> == <w, sigma(x)^T u> for random vectors
    RandomStream rng(10);
    const auto model = ou_model(0.3);
    for (int rep = 0; rep < 10; ++rep) {
        Eigen::VectorXd x(1), w(1), u(1), sw(1), stu(1);
        x[0] = rng.normal();
        w[0] = rng.normal();
        u[0] = rng.normal();
        model->diffusion_apply(x, w, sw);
        model->diffusion_T_apply(x, u, stu);
        CHECK(sw.dot(u) == doctest::Approx(w.dot(stu)));
    }
}

TEST_CASE("gradient_check drives the oracle comparison") {
    RandomStream rng(12);
    const auto model = brownian_model(1);
    const auto obs = endpoint_observable(0);
    const GradientCheckReport report =
        gradient_check(*model, *obs, 10, make_grid(1.0, 16), rng);
    CHECK(report.all_finite);
    CHECK(report.max_rel_error <= 1e-9);

    const auto ou = ou_model(0.1);
    const auto pm = power_mean_observable(1.0);
    const GradientCheckReport r2 = gradient_check(*ou, *pm, 10, make_grid(1.0, 32), rng);
    CHECK(r2.all_finite);
    CHECK(r2.max_rel_error <= 1e-6);
}
