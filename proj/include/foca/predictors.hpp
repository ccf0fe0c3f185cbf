#pragma once

#include <functional>
#include <string>
#include <vector>

#include "foca/cache_schedule.hpp"
#include "foca/cache_state.hpp"
#include "foca/report.hpp"
#include "foca/sources.hpp"

namespace foca {

enum class PredictorKind { Reuse, Taylor, Bdf2Only, FoCa };

std::string to_string(PredictorKind kind);
PredictorKind predictor_kind_from_string(const std::string& s);

/// Copy of the latest fully computed feature.
FeatureVector predict_reuse(const CacheState& cache);

/// Backward differences Delta^1..Delta^m of a uniformly spaced history,
/// newest last. Falls back to the largest representable order.
std::vector<FeatureVector> finite_differences(const std::vector<FeatureVector>& history, int m);

/// Order-m extrapolation of the full-compute history to k steps past the
/// newest full compute. Backward-difference Newton form over the actual node
/// positions, so it reproduces any degree-m polynomial trajectory exactly and
/// tolerates the warmup's tighter spacing. Order degrades with short history.
FeatureVector predict_taylor(const CacheState& cache, int k, int interval, int m);

/// Backward first difference of the two most recent cached entries over
/// their actual spacing.
FeatureVector estimate_derivative(const CacheState& cache, double h);

/// Explicit two-step forecast
///   F_hat(k+1) = (4/3) F(k) - (1/3) F(k-1) + (2h/3) F'(k),
/// with F'(k) from estimate_derivative. The forecast is appended to
/// cache.recent so the predictor can be iterated across an interval.
FeatureVector predict_bdf2(CacheState& cache, double h);

/// Trapezoidal correction
///   F_c(k+1) = F(k) + (h/2) [ F'(anchor) + F'(k+1) ],
/// where F'(anchor) is the slope stored at the latest full compute and
/// F'(k+1) = (predicted - F(k)) / h is the slope implied by the forecast.
/// Replaces the newest recent entry (the forecast) with the corrected value.
FeatureVector correct_heun(CacheState& cache, const FeatureVector& predicted, double h, int interval);

/// predict_bdf2 then correct_heun.
FeatureVector foca_step(CacheState& cache, double h, int interval);

struct RunOptions {
    int taylor_order = 2;
    uint64_t seed = 1;
    int stiffness_window = 5;
};

/// Feature trajectory and states of an uncached (every step full) run.
/// states[s] is the state before step s; states[total] is the terminal state.
struct ReferenceRun {
    std::vector<FeatureVector> features;
    std::vector<FeatureVector> states;
    FeatureVector terminal_state;
};

ReferenceRun run_uncached(TrajectorySource& source, int total_steps, uint64_t seed);

/// Explicit full/skip pattern; the regular (N, warmup) schedule is one case.
struct RunPlan {
    int total_steps = 0;
    int interval = 1;  // N as seen by the predictor formulas
    std::function<bool(int)> is_full;
};

RunPlan plan_from_schedule(const CacheSchedule& schedule);

RunReport run_with_plan(TrajectorySource& source, const RunPlan& plan, PredictorKind kind, const RunOptions& options,
                        const ReferenceRun* reference = nullptr);

/// Iterate the grid: full steps evaluate the source and refresh the cache,
/// skipped steps substitute the predictor's output before completing the
/// step. Records per-step errors against the uncached run.
RunReport run_cached_sampler(TrajectorySource& source, const CacheSchedule& schedule, PredictorKind kind,
                             const RunOptions& options = {}, const ReferenceRun* reference = nullptr);

}  // namespace foca
