#include "pathwalk/sampler.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pathwalk/errors.hpp"

namespace pathwalk {

double SamplerConfig::resolved_newton_tol() const {
    if (newton_tol > 0.0) return newton_tol;
    return 1e-10 * std::max(1.0, std::abs(z_target));
}

void SamplerConfig::validate() const {
    if (proposal == ProposalKind::TangentRandomWalk && !(step > 0.0))
        throw std::invalid_argument("sampler: tangent_rw step must be positive");
    if (proposal == ProposalKind::PcnFlat && !(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("sampler: pcn beta must be in (0, 1]");
    if (newton_tol < 0.0) throw std::invalid_argument("sampler: newton_tol must be positive");
    if (newton_maxiter < 1) throw std::invalid_argument("sampler: newton_maxiter must be >= 1");
    if (!(reversibility_tol > 0.0))
        throw std::invalid_argument("sampler: reversibility_tol must be positive");
    if (chain_length < 0 || burn_in < 0)
        throw std::invalid_argument("sampler: chain_length and burn_in must be nonnegative");
    if (thin < 1) throw std::invalid_argument("sampler: thin must be >= 1");
}

const char* to_string(StepReason reason) {
    switch (reason) {
        case StepReason::Accepted: return "accepted";
        case StepReason::MhReject: return "mh_reject";
        case StepReason::NewtonFailForward: return "newton_fail_forward";
        case StepReason::ReversibilityFail: return "reversibility_fail";
        case StepReason::BlowUp: return "blow_up";
    }
    return "unknown";
}

void ChainStats::count(StepReason reason) {
    switch (reason) {
        case StepReason::Accepted: ++accepted; break;
        case StepReason::MhReject: ++mh_reject; break;
        case StepReason::NewtonFailForward: ++newton_fail_forward; break;
        case StepReason::ReversibilityFail: ++reversibility_fail; break;
        case StepReason::BlowUp: ++blow_up; break;
    }
}

NoiseVector tangent_project(const NoiseVector& v, const NoiseVector& normal) {
    const double nn = inner(normal, normal);
    if (nn == 0.0) throw DegenerateNormal();
    NoiseVector out = v;
    out.values -= (inner(normal, v) / nn) * normal.values;
    return out;
}

static NoiseVector draw_standard(const NoiseVector& like, RandomStream& rng) {
    NoiseVector xi = like.same_shape_zero();
    for (int i = 0; i < xi.values.rows(); ++i)
        for (int j = 0; j < xi.values.cols(); ++j) xi.values(i, j) = rng.normal();
    return xi;
}

TangentProposal propose_tangent_rw(const ManifoldPoint& x, double s, RandomStream& rng) {
    NoiseVector xi = draw_standard(x.z, rng);
    TangentProposal p;
    p.v = tangent_project(xi, x.normal);
    p.v.values *= s;
    p.log_q = -inner(p.v, p.v) / (2.0 * s * s);
    return p;
}

NoiseVector propose_pcn_flat(const ManifoldPoint& x, double beta, RandomStream& rng) {
    NoiseVector xi = draw_standard(x.z, rng);
    NoiseVector tangential = tangent_project(xi, x.normal);

    const double nn = inner(x.normal, x.normal);
    const double along = inner(x.normal, x.z) / nn;  // constant on the affine set
    NoiseVector y = x.z;
    // split off the (fixed) normal component, pCN-update the rest
    y.values -= along * x.normal.values;
    y.values *= std::sqrt(1.0 - beta * beta);
    y.values += beta * tangential.values + along * x.normal.values;
    return y;
}

NewtonOutcome newton_backproject(const Model& model, const Observable& obs,
                                 const NoiseVector& base, const NoiseVector& direction,
                                 double z_target, double tol, int maxiter) {
    NewtonOutcome out;
    const double dir_norm = std::sqrt(inner(direction, direction));
    double alpha = 0.0;
    NoiseVector trial = base;

    for (int it = 0;; ++it) {
        trial.values = base.values + alpha * direction.values;
        AdjointResult adj;
        try {
            adj = adjoint_gradient(model, obs, trial);
        } catch (const IntegrationDiverged&) {
            out.status = NewtonStatus::BlowUp;
            out.iterations = it;
            return out;
        }
        const double residual = adj.value - z_target;
        if (std::abs(residual) <= tol) {
            out.status = NewtonStatus::Converged;
            out.alpha = alpha;
            out.iterations = it;
            out.at_solution = std::move(adj);
            return out;
        }
        if (it == maxiter) {
            out.status = NewtonStatus::MaxIterations;
            out.iterations = it;
            return out;
        }
        const double slope = inner(adj.normal, direction);
        const double grad_norm = adj.normal_norm();
        if (std::abs(slope) < 1e-14 * grad_norm * dir_norm || slope == 0.0) {
            out.status = NewtonStatus::SmallDerivative;
            out.iterations = it;
            return out;
        }
        alpha -= residual / slope;
        if (!std::isfinite(alpha)) {
            out.status = NewtonStatus::SmallDerivative;
            out.iterations = it;
            return out;
        }
    }
}

static ManifoldPoint make_point(NoiseVector z, AdjointResult adj) {
    ManifoldPoint p;
    p.z = std::move(z);
    p.path = std::move(adj.path);
    p.f_value = adj.value;
    p.normal = std::move(adj.normal);
    p.normal_norm = std::sqrt(inner(p.normal, p.normal));
    return p;
}

static StepReason reject_reason(NewtonStatus status) {
    return status == NewtonStatus::BlowUp ? StepReason::BlowUp : StepReason::NewtonFailForward;
}

static StepOutcome mh_step_tangent(ManifoldPoint& x, const Model& model, const Observable& obs,
                                   const SamplerConfig& cfg, RandomStream& rng) {
    const double tol = cfg.resolved_newton_tol();
    StepOutcome out;

    // (1) tangent proposal at x
    const TangentProposal prop = propose_tangent_rw(x, cfg.step, rng);

    // (2) project back onto the manifold along the pre-move normal
    NoiseVector base = x.z;
    base.values += prop.v.values;
    NewtonOutcome fwd =
        newton_backproject(model, obs, base, x.normal, cfg.z_target, tol, cfg.newton_maxiter);
    out.newton_iterations = fwd.iterations;
    if (fwd.status != NewtonStatus::Converged) {
        out.reason = reject_reason(fwd.status);
        return out;
    }
    NoiseVector y_z = base;
    y_z.values += fwd.alpha * x.normal.values;
    ManifoldPoint y = make_point(std::move(y_z), std::move(fwd.at_solution));

    // (3) a degenerate normal at y leaves the reverse move undefined
    if (!(y.normal_norm > 0.0) || !std::isfinite(y.normal_norm)) {
        out.reason = StepReason::ReversibilityFail;
        return out;
    }

    // (4) reverse proposal density
    NoiseVector diff = x.z;
    diff.values -= y.z.values;
    const NoiseVector v_rev = tangent_project(diff, y.normal);
    const double log_q_rev = -inner(v_rev, v_rev) / (2.0 * cfg.step * cfg.step);

    // (5) the reverse Newton search must land back at x
    NoiseVector rev_base = y.z;
    rev_base.values += v_rev.values;
    NewtonOutcome rev =
        newton_backproject(model, obs, rev_base, y.normal, cfg.z_target, tol, cfg.newton_maxiter);
    if (rev.status != NewtonStatus::Converged) {
        out.reason = StepReason::ReversibilityFail;
        return out;
    }
    NoiseVector landed = rev_base;
    landed.values += rev.alpha * y.normal.values;
    landed.values -= x.z.values;
    const double gap = landed.values.norm();
    if (gap > cfg.reversibility_tol * std::max(1.0, x.z.values.norm())) {
        out.reason = StepReason::ReversibilityFail;
        return out;
    }

    // (6) accept/reject; -log normal_norm is the coarea volume factor
    const double log_acc = (log_prior_density(y.z) + log_q_rev - std::log(y.normal_norm)) -
                           (log_prior_density(x.z) + prop.log_q - std::log(x.normal_norm));
    if (std::log(rng.uniform01()) < log_acc) {
        x = std::move(y);  // (7) cached adjoint travels with the point
        out.accepted = true;
        out.reason = StepReason::Accepted;
    } else {
        out.reason = StepReason::MhReject;
    }
    return out;
}

static StepOutcome mh_step_pcn(ManifoldPoint& x, const Model& model, const Observable& obs,
                               const SamplerConfig& cfg, RandomStream& rng) {
    const double tol = cfg.resolved_newton_tol();
    StepOutcome out;

    NoiseVector y_z = propose_pcn_flat(x, cfg.beta, rng);
    AdjointResult adj;
    try {
        adj = adjoint_gradient(model, obs, y_z);
    } catch (const IntegrationDiverged&) {
        out.reason = StepReason::BlowUp;
        return out;
    }
    if (std::abs(adj.value - cfg.z_target) > tol) {
        // rounding pushed the proposal off the hyperplane; correct it
        NewtonOutcome fix = newton_backproject(model, obs, y_z, x.normal, cfg.z_target, tol,
                                               cfg.newton_maxiter);
        out.newton_iterations = fix.iterations;
        if (fix.status != NewtonStatus::Converged) {
            out.reason = reject_reason(fix.status);
            return out;
        }
        y_z.values += fix.alpha * x.normal.values;
        adj = std::move(fix.at_solution);
    }

    // Prior-reversible proposal on a flat manifold with constant |grad F|:
    // prior, proposal and coarea ratios all cancel, acceptance is 1.
    x = make_point(std::move(y_z), std::move(adj));
    out.accepted = true;
    out.reason = StepReason::Accepted;
    return out;
}

StepOutcome mh_step(ManifoldPoint& x, const Model& model, const Observable& obs,
                    const SamplerConfig& cfg, RandomStream& rng) {
    if (cfg.proposal == ProposalKind::PcnFlat) return mh_step_pcn(x, model, obs, cfg, rng);
    return mh_step_tangent(x, model, obs, cfg, rng);
}

// One damped Gauss-Newton descent on |F - z_target| from a given start.
// Returns true on convergence; iterations accumulates across calls.
static bool gauss_newton_attempt(const Model& model, const Observable& obs, NoiseVector& z,
                                 double z_target, double tol, int maxiter, int& iterations,
                                 double& last_residual, ManifoldPoint& out) {
    double lambda = 1.0;
    AdjointResult adj;
    try {
        adj = adjoint_gradient(model, obs, z);
    } catch (const IntegrationDiverged&) {
        return false;
    }
    for (int it = 0; it < maxiter; ++it) {
        const double residual = adj.value - z_target;
        last_residual = std::abs(residual);
        if (last_residual <= tol) {
            out = make_point(z, std::move(adj));
            return out.normal_norm > 0.0;
        }
        const double nn = inner(adj.normal, adj.normal);
        if (nn == 0.0 || !std::isfinite(nn)) return false;

        ++iterations;
        NoiseVector trial = z;
        trial.values -= (lambda * residual / nn) * adj.normal.values;
        AdjointResult trial_adj;
        bool worse;
        try {
            trial_adj = adjoint_gradient(model, obs, trial);
            worse = !(std::abs(trial_adj.value - z_target) < last_residual);
        } catch (const IntegrationDiverged&) {
            worse = true;
        }
        if (worse) {
            lambda *= 0.5;
            if (lambda < 1e-12) return false;
            continue;  // keep the current adjoint, retry shorter
        }
        z = std::move(trial);
        adj = std::move(trial_adj);
        lambda = std::min(1.0, 1.5 * lambda);
    }
    const double residual = adj.value - z_target;
    last_residual = std::abs(residual);
    if (last_residual <= tol) {
        out = make_point(z, std::move(adj));
        return out.normal_norm > 0.0;
    }
    return false;
}

InitialPoint find_initial_point(const Model& model, const Observable& obs, const TimeGrid& grid,
                                double z_target, RandomStream& rng, double tol, int maxiter) {
    InitialPoint result;
    double last_residual = std::numeric_limits<double>::infinity();

    // start at the prior mode, then fall back to prior draws
    const int attempts = 4;
    for (int a = 0; a < attempts; ++a) {
        NoiseVector z;
        if (a == 0) {
            z.grid = grid;
            z.values = Eigen::MatrixXd::Zero(grid.steps, model.noise_dim());
        } else {
            z = sample_prior(grid, model.noise_dim(), rng);
        }
        if (gauss_newton_attempt(model, obs, z, z_target, tol, maxiter, result.iterations,
                                 last_residual, result.point))
            return result;
    }
    throw InitializationFailure(last_residual, result.iterations);
}

ChainResult run_chain(const Model& model, const Observable& obs, const TimeGrid& grid,
                      const SamplerConfig& cfg, RandomStream& rng,
                      const SampleObserver& observer) {
    cfg.validate();
    if (cfg.proposal == ProposalKind::PcnFlat && !(model.affine_flow() && obs.linear()))
        throw std::domain_error(
            "pcn_flat proposal requires an affine model with a linear observable");

    ChainResult result;
    if (cfg.chain_length == 0) return result;

    const auto t0 = std::chrono::steady_clock::now();
    InitialPoint init = find_initial_point(model, obs, grid, cfg.z_target, rng,
                                           cfg.resolved_newton_tol(), 500);
    ManifoldPoint x = std::move(init.point);

    long newton_total = 0;
    for (long step = 1; step <= cfg.chain_length; ++step) {
        const StepOutcome outcome = mh_step(x, model, obs, cfg, rng);
        result.stats.count(outcome.reason);
        newton_total += outcome.newton_iterations;
        if (step > cfg.burn_in && (step - cfg.burn_in) % cfg.thin == 0) {
            result.f_values.push_back(x.f_value);
            if (observer) observer(step, x);
        }
    }
    result.stats.acceptance_rate =
        static_cast<double>(result.stats.accepted) / static_cast<double>(cfg.chain_length);
    result.stats.mean_newton_iters =
        static_cast<double>(newton_total) / static_cast<double>(cfg.chain_length);
    result.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

double tune_step_size(const Model& model, const Observable& obs, const TimeGrid& grid,
                      const SamplerConfig& cfg, RandomStream& rng, int pre_steps, int rounds) {
    InitialPoint init = find_initial_point(model, obs, grid, cfg.z_target, rng,
                                           cfg.resolved_newton_tol(), 500);
    double s = cfg.step;
    for (int round = 0; round < rounds; ++round) {
        SamplerConfig probe = cfg;
        probe.step = s;
        ManifoldPoint x = init.point;
        long accepted = 0;
        for (int i = 0; i < pre_steps; ++i)
            if (mh_step(x, model, obs, probe, rng).accepted) ++accepted;
        const double rate = static_cast<double>(accepted) / pre_steps;
        if (rate > 0.5)
            s *= 1.6;
        else if (rate < 0.2)
            s /= 1.6;
        else
            break;
    }
    return s;
}

}  // namespace pathwalk
