#pragma once

#include "foca/errors.hpp"

namespace foca {

/// Reverse-time sampling grid. Internal step indices count forward from the
/// start of sampling (step 0 is the noisiest step); diffusion timesteps count
/// down from `start_timestep`. This is the single place that owns the mapping.
struct TimeGrid {
    int start_timestep = 50;  // timestep consumed by step 0
    int num_steps = 50;       // number of sampling steps
    double h = 1.0;           // uniform spacing in timestep units

    void validate() const {
        if (num_steps <= 0)
            throw ConfigError("TimeGrid: num_steps must be positive");
        if (h <= 0.0)
            throw ConfigError("TimeGrid: h must be positive");
        if (start_timestep < num_steps - 1)
            throw ConfigError("TimeGrid: start_timestep too small for num_steps");
    }

    /// Diffusion timestep consumed at forward step index s (strictly decreasing in s).
    int timestep(int step) const {
        if (step < 0 || step >= num_steps)
            throw RangeError("TimeGrid::timestep: step out of range");
        return start_timestep - step;
    }

    /// Forward step index at which diffusion timestep t is consumed.
    int step_for_timestep(int t) const { return start_timestep - t; }

    /// Continuous time coordinate of step s, in timestep units.
    double time(int step) const { return h * static_cast<double>(step); }
};

}  // namespace foca
