#pragma once

#include "foca/errors.hpp"

namespace foca {

/// Full-compute / skip pattern over a sampling run. Step s is fully computed
/// iff s < warmup_steps or (s - warmup_steps) % interval == 0.
struct CacheSchedule {
    int interval = 1;      // N
    int total_steps = 0;   // run length
    int warmup_steps = 2;  // always-full prefix

    void validate() const {
        if (interval < 1)
            throw ConfigError("CacheSchedule: interval must be >= 1");
        if (total_steps < 1)
            throw ConfigError("CacheSchedule: total_steps must be >= 1");
        if (warmup_steps < 0)
            throw ConfigError("CacheSchedule: warmup_steps must be >= 0");
    }
};

bool schedule_is_full_step(const CacheSchedule& schedule, int step_index);
int evaluation_count(const CacheSchedule& schedule);
double acceleration_ratio(const CacheSchedule& schedule);

}  // namespace foca
