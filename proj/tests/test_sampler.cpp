#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pathwalk/errors.hpp"
#include "pathwalk/models/brownian.hpp"
#include "pathwalk/models/ou.hpp"
#include "pathwalk/observables.hpp"
#include "pathwalk/sampler.hpp"

using namespace pathwalk;

namespace {

ManifoldPoint point_on_manifold(const Model& model, const Observable& obs, const TimeGrid& grid,
                                double z_target, std::uint64_t seed = 17) {
    RandomStream rng(seed);
    return find_initial_point(model, obs, grid, z_target, rng, 1e-10, 500).point;
}

}  // namespace

TEST_CASE("tangent projection") {
    const TimeGrid grid = make_grid(1.0, 16);
    RandomStream rng(1);
    NoiseVector n = sample_prior(grid, 1, rng);

    // projecting the normal itself gives zero
    const NoiseVector killed = tangent_project(n, n);
    CHECK(killed.values.cwiseAbs().maxCoeff() <= 1e-14 * n.values.cwiseAbs().maxCoeff());

    // a vector already orthogonal to n is unchanged
    NoiseVector v = sample_prior(grid, 1, rng);
    const NoiseVector v_perp = tangent_project(v, n);
    const NoiseVector again = tangent_project(v_perp, n);
    CHECK((again.values - v_perp.values).cwiseAbs().maxCoeff() <= 1e-12);

    // contraction and orthogonality on random inputs
    for (int rep = 0; rep < 10; ++rep) {
        const NoiseVector w = sample_prior(grid, 1, rng);
        const NoiseVector pw = tangent_project(w, n);
        CHECK(inner(pw, pw) <= inner(w, w) * (1 + 1e-12));
        CHECK(std::abs(inner(pw, n)) <=
              1e-12 * std::sqrt(inner(w, w) * inner(n, n)));
    }

    NoiseVector zero = n.same_shape_zero();
    CHECK_THROWS_AS(tangent_project(v, zero), DegenerateNormal);
}

TEST_CASE("tangent random walk proposal") {
    const auto model = brownian_model(1);
    const auto obs = endpoint_observable(0);
    const TimeGrid grid = make_grid(1.0, 1000);
    const ManifoldPoint x = point_on_manifold(*model, *obs, grid, 0.0);

    const double s = 0.3;
    RandomStream rng(2);
    double sum_sq = 0.0;
    const int draws = 10000;
    for (int rep = 0; rep < draws; ++rep) {
        const TangentProposal p = propose_tangent_rw(x, s, rng);
        if (rep < 20)
            CHECK(std::abs(inner(p.v, x.normal)) <=
                  1e-12 * std::sqrt(inner(p.v, p.v) * inner(x.normal, x.normal)));
        sum_sq += inner(p.v, p.v) / (s * s);
        if (rep == 0) CHECK(p.log_q == doctest::Approx(-inner(p.v, p.v) / (2 * s * s)));
    }
    // projected chi-square: mean D - 1 with D = N_t * m = 1000
    CHECK(sum_sq / draws == doctest::Approx(999.0).epsilon(0.02));

    RandomStream r1(5), r2(5);
    const TangentProposal a = propose_tangent_rw(x, s, r1);
    const TangentProposal b = propose_tangent_rw(x, s, r2);
    CHECK(a.v.values == b.v.values);
}

TEST_CASE("pCN proposal limits") {
    const auto model = brownian_model(1);
    const auto obs = endpoint_observable(0);
    const TimeGrid grid = make_grid(1.0, 64);
    RandomStream rng(3);

    ManifoldPoint x = point_on_manifold(*model, *obs, grid, 0.0);
    // move x along the manifold so it has a nonzero tangential component
    SamplerConfig cfg;
    cfg.z_target = 0.0;
    cfg.proposal = ProposalKind::PcnFlat;
    cfg.beta = 0.9;
    for (int i = 0; i < 5; ++i) mh_step(x, *model, *obs, cfg, rng);

    // beta -> 0 keeps the point
    {
        RandomStream r(4);
        const NoiseVector y = propose_pcn_flat(x, 1e-8, r);
        CHECK((y.values - x.z.values).cwiseAbs().maxCoeff() < 1e-6);
    }
    // beta = 1 is an independent draw projected onto the constraint plane:
    // starting points with the same rng give the same proposal
    {
        ManifoldPoint other = x;
        RandomStream r(6);
        for (int i = 0; i < 3; ++i) mh_step(other, *model, *obs, cfg, r);
        RandomStream ra(7), rb(7);
        const NoiseVector ya = propose_pcn_flat(x, 1.0, ra);
        const NoiseVector yb = propose_pcn_flat(other, 1.0, rb);
        CHECK((ya.values - yb.values).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("newton backprojection on a linear constraint") {
    const auto model = brownian_model(1);
    const auto obs = endpoint_observable(0);
    const TimeGrid grid = make_grid(1.0, 32);
    const ManifoldPoint x = point_on_manifold(*model, *obs, grid, 0.4);

    // base already on the manifold: zero residual at iteration 0
    {
        const NewtonOutcome out =
            newton_backproject(*model, *obs, x.z, x.normal, 0.4, 1e-10, 20);
        CHECK(out.status == NewtonStatus::Converged);
        CHECK(out.iterations == 0);
        CHECK(out.alpha == 0.0);
    }
    // off-manifold base with linear F: exactly one iteration
    {
        RandomStream rng(8);
        NoiseVector base = x.z;
        base.values += sample_prior(grid, 1, rng).values;
        const NewtonOutcome out =
            newton_backproject(*model, *obs, base, x.normal, 0.4, 1e-10, 20);
        CHECK(out.status == NewtonStatus::Converged);
        CHECK(out.iterations == 1);
        CHECK(std::abs(out.at_solution.value - 0.4) <= 1e-10);
    }
}

TEST_CASE("newton convergence on the curved OU cube manifold") {
    const auto model = ou_model(0.1);
    const auto obs = power_mean_observable(3.0);
    const TimeGrid grid = make_grid(50.0, 200);
    const ManifoldPoint x = point_on_manifold(*model, *obs, grid, 0.2);

    RandomStream rng(9);
    std::vector<int> iters;
    for (int rep = 0; rep < 21; ++rep) {
        const TangentProposal p = propose_tangent_rw(x, 0.05, rng);
        NoiseVector base = x.z;
        base.values += p.v.values;
        const NewtonOutcome out =
            newton_backproject(*model, *obs, base, x.normal, 0.2, 1e-10, 20);
        REQUIRE(out.status == NewtonStatus::Converged);
        CHECK(std::abs(out.at_solution.value - 0.2) <= 1e-10);
        iters.push_back(out.iterations);
    }
    std::sort(iters.begin(), iters.end());
    const int median = iters[iters.size() / 2];
    MESSAGE("median newton iterations: ", median);
    CHECK(median <= 20);
}

TEST_CASE("mh_step failure paths leave the point unchanged") {
    const auto model = ou_model(0.1);
    const auto obs = power_mean_observable(3.0);
    const TimeGrid grid = make_grid(10.0, 50);
    ManifoldPoint x = point_on_manifold(*model, *obs, grid, 0.2);
    const Eigen::MatrixXd z_before = x.z.values;

    SamplerConfig cfg;
    cfg.z_target = 0.2;
    cfg.step = 1e5;  // far beyond the Newton basin
    cfg.newton_maxiter = 3;
    RandomStream rng(10);
    int fails = 0;
    for (int rep = 0; rep < 10; ++rep) {
        const StepOutcome out = mh_step(x, *model, *obs, cfg, rng);
        if (!out.accepted && (out.reason == StepReason::NewtonFailForward ||
                              out.reason == StepReason::ReversibilityFail))
            ++fails;
    }
    CHECK(fails == 10);
    CHECK(x.z.values == z_before);
}

TEST_CASE("reversibility symmetry of accepted transitions") {
    const auto model = ou_model(0.1);
    const auto obs = power_mean_observable(3.0);
    const TimeGrid grid = make_grid(10.0, 50);
    const ManifoldPoint x0 = point_on_manifold(*model, *obs, grid, 0.2);

    RandomStream rng(11);
    int verified = 0;
    for (int rep = 0; rep < 30 && verified < 10; ++rep) {
        const TangentProposal p = propose_tangent_rw(x0, 0.2, rng);
        NoiseVector base = x0.z;
        base.values += p.v.values;
        const NewtonOutcome fwd =
            newton_backproject(*model, *obs, base, x0.normal, 0.2, 1e-10, 20);
        if (fwd.status != NewtonStatus::Converged) continue;
        NoiseVector y = base;
        y.values += fwd.alpha * x0.normal.values;
        const NoiseVector& normal_y = fwd.at_solution.normal;

        NoiseVector diff = x0.z;
        diff.values -= y.values;
        const NoiseVector v_rev = tangent_project(diff, normal_y);
        NoiseVector rev_base = y;
        rev_base.values += v_rev.values;
        const NewtonOutcome rev =
            newton_backproject(*model, *obs, rev_base, normal_y, 0.2, 1e-10, 20);
        if (rev.status != NewtonStatus::Converged) continue;
        NoiseVector landed = rev_base;
        landed.values += rev.alpha * normal_y.values;
        const double gap = (landed.values - x0.z.values).norm();
        CHECK(gap <= 1e-8 * std::max(1.0, x0.z.values.norm()));
        ++verified;
    }
    CHECK(verified >= 10);
}

TEST_CASE("acceptance decisions depend only on log-density differences") {
    // shifting both proposal log-densities by the same constant flips nothing
    const auto model = ou_model(0.1);
    const auto obs = power_mean_observable(3.0);
    const TimeGrid grid = make_grid(10.0, 50);
    const ManifoldPoint start = point_on_manifold(*model, *obs, grid, 0.2);

    for (double offset : {0.0, 37.5}) {
        RandomStream rng(12);
        ManifoldPoint x = start;
        std::vector<int> decisions;
        for (int rep = 0; rep < 40; ++rep) {
            const TangentProposal p = propose_tangent_rw(x, 0.2, rng);
            NoiseVector base = x.z;
            base.values += p.v.values;
            const NewtonOutcome fwd =
                newton_backproject(*model, *obs, base, x.normal, 0.2, 1e-10, 20);
            if (fwd.status != NewtonStatus::Converged) {
                decisions.push_back(-1);
                continue;
            }
            NoiseVector y_z = base;
            y_z.values += fwd.alpha * x.normal.values;
            ManifoldPoint y;
            y.z = y_z;
            y.path = fwd.at_solution.path;
            y.f_value = fwd.at_solution.value;
            y.normal = fwd.at_solution.normal;
            y.normal_norm = std::sqrt(inner(y.normal, y.normal));

            NoiseVector diff = x.z;
            diff.values -= y.z.values;
            const NoiseVector v_rev = tangent_project(diff, y.normal);
            const double log_q_fwd = p.log_q + offset;
            const double log_q_rev = -inner(v_rev, v_rev) / (2 * 0.2 * 0.2) + offset;
            const double log_acc =
                (log_prior_density(y.z) + log_q_rev - std::log(y.normal_norm)) -
                (log_prior_density(x.z) + log_q_fwd - std::log(x.normal_norm));
            const bool accept = std::log(rng.uniform01()) < log_acc;
            decisions.push_back(accept ? 1 : 0);
            if (accept) x = y;
        }
        static std::vector<int> reference;
        if (offset == 0.0)
            reference = decisions;
        else
            CHECK(decisions == reference);
    }
}

TEST_CASE("initialization on the bridge manifold is immediate") {
    const auto model = brownian_model(1);
    const auto obs = endpoint_observable(0);
    RandomStream rng(13);
    const InitialPoint init =
        find_initial_point(*model, *obs, make_grid(1.0, 64), 0.0, rng, 1e-10, 100);
    CHECK(init.iterations == 0);
    CHECK(init.point.f_value == 0.0);
    CHECK(init.point.normal_norm > 0.0);
}

TEST_CASE("initialization on a linear constraint takes one step") {
    const auto model = brownian_model(1);
    const auto obs = endpoint_observable(0);
    RandomStream rng(14);
    const InitialPoint init =
        find_initial_point(*model, *obs, make_grid(1.0, 64), 0.7, rng, 1e-10, 100);
    CHECK(init.iterations == 1);
    CHECK(std::abs(init.point.f_value - 0.7) <= 1e-10);
}

TEST_CASE("run_chain degenerate and invariant cases") {
    const auto model = brownian_model(1);
    const auto obs = endpoint_observable(0);
    const TimeGrid grid = make_grid(1.0, 128);

    SamplerConfig cfg;
    cfg.z_target = 0.0;
    cfg.proposal = ProposalKind::PcnFlat;
    cfg.beta = 0.6;
    cfg.chain_length = 0;
    RandomStream rng(15);
    const ChainResult empty = run_chain(*model, *obs, grid, cfg, rng);
    CHECK(empty.f_values.empty());
    CHECK(empty.stats.total() == 0);

    cfg.chain_length = 2000;
    cfg.burn_in = 100;
    cfg.thin = 2;
    const double tol = cfg.resolved_newton_tol();
    long checked = 0;
    const ChainResult run = run_chain(
        *model, *obs, grid, cfg, rng, [&](long, const ManifoldPoint& p) {
            CHECK(std::abs(p.f_value - cfg.z_target) <= tol);
            CHECK(std::abs(obs->value(p.path) - p.f_value) == 0.0);
            ++checked;
        });
    CHECK(checked == (2000 - 100) / 2);
    CHECK(run.stats.acceptance_rate == doctest::Approx(1.0));  // pCN on a flat manifold
    CHECK(run.stats.total() == 2000);
}

TEST_CASE("pcn rejects curved configurations") {
    const auto model = ou_model(0.1);
    const auto obs = power_mean_observable(3.0);
    SamplerConfig cfg;
    cfg.z_target = 0.2;
    cfg.proposal = ProposalKind::PcnFlat;
    cfg.chain_length = 10;
    RandomStream rng(16);
    CHECK_THROWS_AS(run_chain(*model, *obs, make_grid(1.0, 16), cfg, rng),
                    std::domain_error);
}

TEST_CASE("seeded replay reproduces the chain") {
    const auto model = ou_model(0.1);
    const auto obs = power_mean_observable(1.0);
    const TimeGrid grid = make_grid(5.0, 50);
    SamplerConfig cfg;
    cfg.z_target = 0.1;
    cfg.step = 0.5;
    cfg.chain_length = 300;
    RandomStream r1(99), r2(99);
    const ChainResult a = run_chain(*model, *obs, grid, cfg, r1);
    const ChainResult b = run_chain(*model, *obs, grid, cfg, r2);
    CHECK(a.f_values == b.f_values);
    CHECK(a.stats.accepted == b.stats.accepted);
}

TEST_CASE("step size tuner lands in the target window") {
    const auto model = ou_model(0.1);
    const auto obs = power_mean_observable(1.0);
    const TimeGrid grid = make_grid(5.0, 50);
    SamplerConfig cfg;
    cfg.z_target = 0.1;
    cfg.step = 10.0;  // start far too large
    RandomStream rng(18);
    const double tuned = tune_step_size(*model, *obs, grid, cfg, rng);
    cfg.step = tuned;
    cfg.chain_length = 2000;
    const ChainResult run = run_chain(*model, *obs, grid, cfg, rng);
    CHECK(run.stats.acceptance_rate > 0.15);
    CHECK(run.stats.acceptance_rate < 0.6);
}
