#pragma once

#include <Eigen/Dense>

#include "pathwalk/grid.hpp"

namespace pathwalk {

// Discrete trajectory on the time grid: row i is the state at t_i,
// (N_t + 1) rows in total, row 0 is the model's initial state.
struct StatePath {
    Eigen::MatrixXd states;  // (N_t + 1) rows, n columns
    TimeGrid grid;

    int state_dim() const { return static_cast<int>(states.cols()); }
    int steps() const { return static_cast<int>(states.rows()) - 1; }

    Eigen::VectorXd state_at(int i) const { return states.row(i).transpose(); }
    Eigen::VectorXd final_state() const { return states.row(states.rows() - 1).transpose(); }
};

}  // namespace pathwalk
