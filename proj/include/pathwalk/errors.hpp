#pragma once

#include <stdexcept>
#include <string>

namespace pathwalk {

// Non-finite state during forward integration. The sampler catches this
// and treats the proposal as rejected; everywhere else it propagates.
class IntegrationDiverged : public std::runtime_error {
  public:
    explicit IntegrationDiverged(int step)
        : std::runtime_error("forward integration diverged at step " + std::to_string(step)),
          step_(step) {}
    int step() const { return step_; }

  private:
    int step_;
};

class InitializationFailure : public std::runtime_error {
  public:
    InitializationFailure(double residual, int iterations)
        : std::runtime_error("could not find a point on the constraint manifold: residual " +
                             std::to_string(residual) + " after " + std::to_string(iterations) +
                             " iterations"),
          residual_(residual),
          iterations_(iterations) {}
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

  private:
    double residual_;
    int iterations_;
};

class DegenerateNormal : public std::runtime_error {
  public:
    DegenerateNormal() : std::runtime_error("constraint gradient vanishes at the current point") {}
};

}  // namespace pathwalk
