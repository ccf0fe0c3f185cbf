#include "foca/cache_schedule.hpp"

#include <algorithm>
#include <string>

namespace foca {

bool schedule_is_full_step(const CacheSchedule& schedule, int step_index) {
    schedule.validate();
    if (step_index < 0 || step_index >= schedule.total_steps)
        throw RangeError("schedule_is_full_step: step_index " + std::to_string(step_index) + " not in [0, " +
                         std::to_string(schedule.total_steps) + ")");
    if (step_index < schedule.warmup_steps)
        return true;
    return (step_index - schedule.warmup_steps) % schedule.interval == 0;
}

int evaluation_count(const CacheSchedule& schedule) {
    schedule.validate();
    const int warm = std::min(schedule.warmup_steps, schedule.total_steps);
    const int rest = schedule.total_steps - warm;
    return warm + (rest + schedule.interval - 1) / schedule.interval;
}

double acceleration_ratio(const CacheSchedule& schedule) {
    return static_cast<double>(schedule.total_steps) / static_cast<double>(evaluation_count(schedule));
}

}  // namespace foca
