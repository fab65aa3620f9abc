#pragma once

#include <stdexcept>

namespace pathwalk {

// Uniform grid on [0, T] with N_t steps. Noise entry i drives the step
// from t_i to t_{i+1} (left-endpoint / Ito convention).
struct TimeGrid {
    double horizon = 0.0;  // T
    int steps = 0;         // N_t
    double dt = 0.0;       // T / N_t

    bool operator==(const TimeGrid& other) const {
        return horizon == other.horizon && steps == other.steps;
    }
};

inline TimeGrid make_grid(double horizon, int steps) {
    if (!(horizon > 0.0))
        throw std::invalid_argument("make_grid: horizon must be positive");
    if (steps < 1)
        throw std::invalid_argument("make_grid: need at least one step");
    return TimeGrid{horizon, steps, horizon / steps};
}

// Periodic spatial grid on [0, L) with N_x points, x_j = j * dx.
struct SpatialGrid {
    double length = 0.0;  // L
    int points = 0;       // N_x
    double dx = 0.0;      // L / N_x

    double x(int j) const { return j * dx; }
};

inline SpatialGrid make_spatial_grid(double length, int points) {
    if (!(length > 0.0))
        throw std::invalid_argument("make_spatial_grid: length must be positive");
    if (points < 8)
        throw std::invalid_argument("make_spatial_grid: need at least 8 points");
    return SpatialGrid{length, points, length / points};
}

}  // namespace pathwalk
