#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pathwalk/dynamics.hpp"
#include "pathwalk/model.hpp"
#include "pathwalk/noise.hpp"
#include "pathwalk/observable.hpp"
#include "pathwalk/rng.hpp"

namespace pathwalk {

// Chain state: a noise vector on the constraint manifold together with its
// cached trajectory, observable value and constraint gradient.
struct ManifoldPoint {
    NoiseVector z;
    StatePath path;
    double f_value = 0.0;
    NoiseVector normal;       // dF/dz at z
    double normal_norm = 0.0; // > 0 for every point admitted to a chain
};

enum class ProposalKind { TangentRandomWalk, PcnFlat };

struct SamplerConfig {
    double z_target = 0.0;
    ProposalKind proposal = ProposalKind::TangentRandomWalk;
    double step = 0.1;            // tangent random walk scale s
    double beta = 0.5;            // pCN mixing parameter, 0 < beta <= 1
    double newton_tol = 0.0;      // 0 means auto: 1e-10 * max(1, |z_target|)
    int newton_maxiter = 20;
    double reversibility_tol = 1e-8;
    long chain_length = 0;
    long burn_in = 0;
    long thin = 1;
    std::uint64_t seed = 1;

    double resolved_newton_tol() const;
    void validate() const;  // throws invalid_argument on nonsense
};

enum class StepReason { Accepted, MhReject, NewtonFailForward, ReversibilityFail, BlowUp };

const char* to_string(StepReason reason);

// Result of one MH step; the (possibly updated) point is the mutated
// chain-state argument.
struct StepOutcome {
    bool accepted = false;
    StepReason reason = StepReason::MhReject;
    int newton_iterations = 0;  // forward projection cost of this step
};

struct ChainStats {
    long accepted = 0;
    long mh_reject = 0;
    long newton_fail_forward = 0;
    long reversibility_fail = 0;
    long blow_up = 0;
    double acceptance_rate = 0.0;
    double mean_newton_iters = 0.0;
    double wall_seconds = 0.0;

    long total() const {
        return accepted + mh_reject + newton_fail_forward + reversibility_fail + blow_up;
    }
    void count(StepReason reason);
};

// Orthogonal projection onto the tangent hyperplane:
// v - (<n,v>/<n,n>) n. Throws DegenerateNormal on a zero normal.
NoiseVector tangent_project(const NoiseVector& v, const NoiseVector& normal);

struct TangentProposal {
    NoiseVector v;
    double log_q = 0.0;  // unnormalized: tangent dimensions match on both
                         // sides of a move, so normalizers cancel
};

// v = s * project(xi) for a standard normal draw xi.
TangentProposal propose_tangent_rw(const ManifoldPoint& x, double s, RandomStream& rng);

// pCN restricted to an affine constraint set: the component along the
// normal is kept fixed and the tangential component gets the
// prior-reversible update sqrt(1-beta^2) * (.) + beta * projected draw.
// Only valid when the model/observable pair is flagged linear; the chain
// driver enforces that.
NoiseVector propose_pcn_flat(const ManifoldPoint& x, double beta, RandomStream& rng);

enum class NewtonStatus { Converged, MaxIterations, SmallDerivative, BlowUp };

struct NewtonOutcome {
    NewtonStatus status = NewtonStatus::MaxIterations;
    double alpha = 0.0;
    int iterations = 0;
    AdjointResult at_solution;  // valid when status == Converged
};

// Scalar Newton along a fixed direction: solve F(base + alpha d) = z_target.
// One forward plus one adjoint solve per iteration; the adjoint at the
// solution is returned for reuse.
NewtonOutcome newton_backproject(const Model& model, const Observable& obs,
                                 const NoiseVector& base, const NoiseVector& direction,
                                 double z_target, double tol, int maxiter);

// One projected MH step: tangent proposal, Newton backprojection along the
// stored normal, reverse-move density, reversibility check, and the
// accept/reject with the co-dimension-1 coarea factor 1/|grad F| folded in
// as -log normal_norm. All failure modes reject in place; nothing throws.
StepOutcome mh_step(ManifoldPoint& x, const Model& model, const Observable& obs,
                    const SamplerConfig& cfg, RandomStream& rng);

struct InitialPoint {
    ManifoldPoint point;
    int iterations = 0;
};

// Damped Gauss-Newton flow z <- z - lambda (F - z_target) n / |n|^2 from
// z = 0, falling back to prior draws when that start is degenerate or
// stalls. Throws InitializationFailure when nothing converges.
InitialPoint find_initial_point(const Model& model, const Observable& obs, const TimeGrid& grid,
                                double z_target, RandomStream& rng, double tol, int maxiter);

using SampleObserver = std::function<void(long step, const ManifoldPoint& point)>;

struct ChainResult {
    std::vector<double> f_values;  // observable value of each retained sample
    ChainStats stats;
};

// Drives chain_length MH steps, discards burn_in, retains every thin-th
// sample. The observer (optional) sees every retained point.
ChainResult run_chain(const Model& model, const Observable& obs, const TimeGrid& grid,
                      const SamplerConfig& cfg, RandomStream& rng,
                      const SampleObserver& observer = {});

// Pre-run step-size tuning for the tangent random walk, targeting an
// acceptance rate in [0.2, 0.5].
double tune_step_size(const Model& model, const Observable& obs, const TimeGrid& grid,
                      const SamplerConfig& cfg, RandomStream& rng, int pre_steps = 200,
                      int rounds = 12);

}  // namespace pathwalk
