#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "foca/feature.hpp"

namespace foca {

/// Per-step record of a cached run, measured against the uncached run.
struct StepRecord {
    int step_index = 0;
    bool is_full = false;
    std::optional<FeatureVector> predicted;  // absent on full steps
    FeatureVector truth;                     // reference (uncached) feature
    double rel_error = 0.0;                  // 0 on full steps by convention
    bool degenerate_truth = false;
    double lte = 0.0;
    double stiffness_index = 0.0;
    double state_deviation = 0.0;  // cached vs uncached state after this step
    bool fallback_used = false;
};

struct RunReport {
    std::vector<StepRecord> records;
    std::vector<FeatureVector> used_features;  // feature consumed at each step
    int evaluation_count = 0;
    double acceleration_ratio = 1.0;
    double terminal_sample_deviation = 0.0;
    double mmd_to_data = std::numeric_limits<double>::quiet_NaN();
    int fallback_steps = 0;
    bool aborted = false;
    int abort_step = -1;

    double max_rel_error() const {
        double m = 0.0;
        for (const auto& r : records)
            if (!r.is_full && r.rel_error > m)
                m = r.rel_error;
        return m;
    }
};

}  // namespace foca
