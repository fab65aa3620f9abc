#pragma once

#include <functional>
#include <memory>

#include "pathwalk/grid.hpp"
#include "pathwalk/observable.hpp"

namespace pathwalk {

// f(phi) = g(x_N) for a scalar reducer g of the final state.
std::unique_ptr<Observable> endpoint_observable(int component);
std::unique_ptr<Observable> endpoint_observable(
    std::function<double(const Eigen::VectorXd&)> reducer,
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> reducer_gradient, bool linear = false);

// f(phi) = (1/T) int sign(phi) |phi|^alpha dt as a left-point sum over
// i = 1..N (x_0 is fixed and excluded). alpha = 1 is the temporal mean.
std::unique_ptr<Observable> power_mean_observable(double alpha);

// Ito stochastic area of a planar path,
// f = 1/2 sum_i [x1_i (x2_{i+1} - x2_i) - x2_i (x1_{i+1} - x1_i)].
std::unique_ptr<Observable> levy_area_observable();

// f(phi) = max_i x_i - min_i x_i with the subgradient placed at the first
// argmax / argmin row (ties broken by lowest index).
std::unique_ptr<Observable> range_observable();

// f(phi) = dx * sum_j q_j at final time, for states laid out as
// (q_0..q_{Nx-1}, u_0..u_{Nx-1}).
std::unique_ptr<Observable> integrated_mass_observable(const SpatialGrid& grid);

}  // namespace pathwalk
