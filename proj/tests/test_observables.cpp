#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pathwalk/observables.hpp"
#include "pathwalk/rng.hpp"

using namespace pathwalk;

namespace {

StatePath path_from(const std::vector<double>& values, double horizon = 1.0) {
    StatePath p;
    p.grid = make_grid(horizon, static_cast<int>(values.size()) - 1);
    p.states.resize(values.size(), 1);
    for (std::size_t i = 0; i < values.size(); ++i) p.states(i, 0) = values[i];
    return p;
}

StatePath random_path(int steps, int n, RandomStream& rng, double horizon = 1.0) {
    StatePath p;
    p.grid = make_grid(horizon, steps);
    p.states.resize(steps + 1, n);
    for (int i = 0; i <= steps; ++i)
        for (int j = 0; j < n; ++j) p.states(i, j) = rng.normal();
    return p;
}

// central finite differences of obs.value over interior rows (x_0 is fixed)
Eigen::MatrixXd fd_state_gradient(const Observable& obs, StatePath path, double h = 1e-6) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(path.states.rows(), path.states.cols());
    for (int i = 1; i < path.states.rows(); ++i)
        for (int j = 0; j < path.states.cols(); ++j) {
            const double orig = path.states(i, j);
            path.states(i, j) = orig + h;
            const double fp = obs.value(path);
            path.states(i, j) = orig - h;
            const double fm = obs.value(path);
            path.states(i, j) = orig;
            g(i, j) = (fp - fm) / (2 * h);
        }
    return g;
}

void check_gradient(const Observable& obs, const StatePath& path, double tol = 1e-6) {
    const Eigen::MatrixXd analytic = obs.state_gradient(path);
    const Eigen::MatrixXd fd = fd_state_gradient(obs, path);
    const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
    for (int i = 1; i < analytic.rows(); ++i)
        for (int j = 0; j < analytic.cols(); ++j)
            CHECK(std::abs(analytic(i, j) - fd(i, j)) <= tol * scale);
}

}  // namespace

TEST_CASE("endpoint observable") {
    const auto obs = endpoint_observable(0);
    const StatePath p = path_from({0.0, 0.3, 0.7});
    CHECK(obs->value(p) == doctest::Approx(0.7));

    const Eigen::MatrixXd g = obs->state_gradient(p);
    CHECK(g(2, 0) == 1.0);
    CHECK(g.topRows(2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(obs->linear());

    CHECK_THROWS_AS(endpoint_observable(2)->value(p), std::invalid_argument);
    CHECK_THROWS_AS(endpoint_observable(-1), std::invalid_argument);
}

TEST_CASE("power mean observable values") {
    // constant path, alpha = 1: left-point Riemann sum of a constant
    const auto mean = power_mean_observable(1.0);
    CHECK(mean->value(path_from({0.4, 0.4, 0.4, 0.4, 0.4})) == doctest::Approx(0.4));

    // phi = -2, alpha = 3 -> sign * |phi|^3 = -8
    const auto cube = power_mean_observable(3.0);
    CHECK(cube->value(path_from({-2, -2, -2, -2, -2})) == doctest::Approx(-8.0));

    // alpha = 2, path (0, 1, -1, 1, 1): (1/4)(1 - 1 + 1 + 1) = 0.5
    const auto square = power_mean_observable(2.0);
    CHECK(square->value(path_from({0, 1, -1, 1, 1})) == doctest::Approx(0.5));

    CHECK_THROWS_AS(power_mean_observable(0.5), std::domain_error);
}

TEST_CASE("power mean gradients, including the origin") {
    RandomStream rng(21);
    for (double alpha : {1.0, 1.5, 2.0, 3.0}) {
        const auto obs = power_mean_observable(alpha);
        check_gradient(*obs, random_path(12, 1, rng));
    }
    // at x = 0 the slope is 0 for alpha > 1 and dt/T for alpha = 1
    const StatePath zero = path_from({0, 0, 0, 0});
    CHECK(power_mean_observable(3.0)->state_gradient(zero).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::MatrixXd g1 = power_mean_observable(1.0)->state_gradient(zero);
    CHECK(g1(1, 0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("power mean with alpha 1 is positively homogeneous") {
    RandomStream rng(22);
    const auto obs = power_mean_observable(1.0);
    const StatePath p = random_path(16, 1, rng);
    StatePath scaled = p;
    scaled.states *= 2.5;
    CHECK(obs->value(scaled) == doctest::Approx(2.5 * obs->value(p)));
}

TEST_CASE("levy area values") {
    // straight ray from the origin encloses nothing
    StatePath ray;
    ray.grid = make_grid(1.0, 4);
    ray.states.resize(5, 2);
    for (int i = 0; i <= 4; ++i) {
        ray.states(i, 0) = 0.3 * i;
        ray.states(i, 1) = 0.7 * i;
    }
    const auto obs = levy_area_observable();
    CHECK(obs->value(ray) == doctest::Approx(0.0));

    // unit square loop walked counterclockwise: Ito sum gives 1.0
    StatePath square;
    square.grid = make_grid(1.0, 4);
    square.states.resize(5, 2);
    square.states << 0, 0, 1, 0, 1, 1, 0, 1, 0, 0;
    CHECK(obs->value(square) == doctest::Approx(1.0));

    CHECK_THROWS_AS(obs->value(path_from({0, 1, 2})), std::invalid_argument);
}

TEST_CASE("levy area gradient is exact") {
    RandomStream rng(23);
    const auto obs = levy_area_observable();
    check_gradient(*obs, random_path(8, 2, rng));
}

TEST_CASE("levy area is invariant under rotations of the plane") {
    RandomStream rng(24);
    const auto obs = levy_area_observable();
    const StatePath p = random_path(32, 2, rng);
    const double base = obs->value(p);
    for (int rep = 0; rep < 5; ++rep) {
        const double theta = rng.uniform01() * 2 * std::numbers::pi;
        StatePath rotated = p;
        for (int i = 0; i < p.states.rows(); ++i) {
            const double a = p.states(i, 0), b = p.states(i, 1);
            rotated.states(i, 0) = std::cos(theta) * a - std::sin(theta) * b;
            rotated.states(i, 1) = std::sin(theta) * a + std::cos(theta) * b;
        }
        CHECK(std::abs(obs->value(rotated) - base) <= 1e-12);
    }
}

TEST_CASE("range observable") {
    const auto obs = range_observable();
    CHECK(obs->value(path_from({0, 2, -1, 1})) == doctest::Approx(3.0));

    // monotone path: extremes at the endpoints
    CHECK(obs->value(path_from({0, 1, 2, 3})) == doctest::Approx(3.0));

    // constant path: first-index tie rule puts +1 and -1 both on row 0
    const StatePath flat = path_from({1, 1, 1});
    CHECK(obs->value(flat) == 0.0);
    const Eigen::MatrixXd g = obs->state_gradient(flat);
    CHECK(g.cwiseAbs().maxCoeff() == 0.0);

    // subgradient rows away from ties
    const Eigen::MatrixXd g2 = obs->state_gradient(path_from({0, 2, -1, 1}));
    CHECK(g2(1, 0) == 1.0);
    CHECK(g2(2, 0) == -1.0);
    CHECK(g2.cwiseAbs().sum() == 2.0);
}

TEST_CASE("range gradient matches finite differences away from ties") {
    RandomStream rng(25);
    const auto obs = range_observable();
    check_gradient(*obs, random_path(16, 1, rng));
}

TEST_CASE("range is invariant under constant shifts") {
    RandomStream rng(26);
    const auto obs = range_observable();
    const StatePath p = random_path(16, 1, rng);
    StatePath shifted = p;
    shifted.states.array() += 5.75;
    CHECK(obs->value(shifted) == doctest::Approx(obs->value(p)));
}

TEST_CASE("integrated mass observable") {
    const SpatialGrid grid = make_spatial_grid(50.0, 10);
    const auto obs = integrated_mass_observable(grid);

    StatePath p;
    p.grid = make_grid(1.0, 2);
    p.states = Eigen::MatrixXd::Zero(3, 20);
    CHECK(obs->value(p) == 0.0);  // laminar

    p.states.row(2).head(10).setConstant(1.0);  // q = 1 on L = 50
    CHECK(obs->value(p) == doctest::Approx(50.0));

    StatePath bad;
    bad.grid = p.grid;
    bad.states = Eigen::MatrixXd::Zero(3, 12);
    CHECK_THROWS_AS(obs->value(bad), std::invalid_argument);

    RandomStream rng(27);
    check_gradient(*obs, random_path(4, 20, rng));

    // the trace is Q(t)
    p.states.row(1).head(10).setConstant(0.2);
    const Eigen::VectorXd tr = obs->trace(p);
    CHECK(tr[0] == 0.0);
    CHECK(tr[1] == doctest::Approx(10.0));
    CHECK(tr[2] == doctest::Approx(50.0));
}
