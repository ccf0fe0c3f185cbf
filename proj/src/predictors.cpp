#include "foca/predictors.hpp"

#include <algorithm>
#include <cmath>

#include "foca/diagnostics.hpp"

namespace foca {

std::string to_string(PredictorKind kind) {
    switch (kind) {
        case PredictorKind::Reuse:
            return "reuse";
        case PredictorKind::Taylor:
            return "taylor";
        case PredictorKind::Bdf2Only:
            return "bdf2";
        case PredictorKind::FoCa:
            return "foca";
    }
    return "unknown";
}

PredictorKind predictor_kind_from_string(const std::string& s) {
    if (s == "reuse")
        return PredictorKind::Reuse;
    if (s == "taylor")
        return PredictorKind::Taylor;
    if (s == "bdf2")
        return PredictorKind::Bdf2Only;
    if (s == "foca")
        return PredictorKind::FoCa;
    throw ConfigError("unknown predictor kind '" + s + "' (expected reuse|taylor|bdf2|foca)");
}

FeatureVector predict_reuse(const CacheState& cache) {
    if (!cache.has_last_full())
        throw HistoryError("predict_reuse: no full compute in cache");
    return cache.last_full().value;
}

std::vector<FeatureVector> finite_differences(const std::vector<FeatureVector>& history, int m) {
    if (history.empty())
        throw HistoryError("finite_differences: empty history");
    const int max_order = static_cast<int>(history.size()) - 1;
    const int order = std::min(m, max_order);
    std::vector<FeatureVector> out;
    out.reserve(static_cast<size_t>(order));
    std::vector<FeatureVector> level = history;
    for (int i = 1; i <= order; ++i) {
        std::vector<FeatureVector> next;
        next.reserve(level.size() - 1);
        for (size_t j = 1; j < level.size(); ++j)
            next.push_back(level[j] - level[j - 1]);
        out.push_back(next.back());
        level = std::move(next);
    }
    return out;
}

FeatureVector predict_taylor(const CacheState& cache, int k, int interval, int m) {
    (void)interval;
    if (k < 1)
        throw RangeError("predict_taylor: skip offset k must be >= 1");
    if (m < 0)
        throw RangeError("predict_taylor: order m must be >= 0");
    const auto& hist = cache.taylor_history();
    if (hist.empty())
        throw HistoryError("predict_taylor: no full compute in cache");

    // Newton form over the newest (order+1) full computes, nodes in step units.
    const int order = std::min<int>(m, static_cast<int>(hist.size()) - 1);
    const size_t n = static_cast<size_t>(order) + 1;
    std::vector<double> nodes(n);
    std::vector<FeatureVector> dd(n);
    const size_t base = hist.size() - n;
    for (size_t i = 0; i < n; ++i) {
        nodes[i] = static_cast<double>(hist[base + i].step);
        dd[i] = hist[base + i].value;
    }
    for (size_t level = 1; level < n; ++level)
        for (size_t i = n - 1; i >= level; --i) {
            dd[i] = (1.0 / (nodes[i] - nodes[i - level])) * (dd[i] - dd[i - 1]);
            if (i == level)
                break;
        }
    const double target = static_cast<double>(hist.back().step + k);
    FeatureVector result = dd[n - 1];
    for (size_t i = n - 1; i > 0; --i) {
        result = axpy(dd[i - 1], target - nodes[i - 1], result);
    }
    ensure_finite(result, "predict_taylor");
    return result;
}

FeatureVector estimate_derivative(const CacheState& cache, double h) {
    const auto& recent = cache.recent();
    if (recent.size() < 2)
        throw HistoryError("estimate_derivative: needs two cached entries");
    const CacheEntry& a = recent[recent.size() - 2];
    const CacheEntry& b = recent.back();
    const double h_eff = (b.step - a.step) * h;
    if (h_eff <= 0.0)
        throw RangeError("estimate_derivative: cached entries not in increasing step order");
    return (1.0 / h_eff) * (b.value - a.value);
}

FeatureVector predict_bdf2(CacheState& cache, double h) {
    const auto& recent = cache.recent();
    if (recent.size() < 2)
        throw HistoryError("predict_bdf2: needs two cached entries");
    const FeatureVector deriv = estimate_derivative(cache, h);
    const CacheEntry& prev = recent[recent.size() - 2];
    const CacheEntry& cur = recent.back();
    FeatureVector out = (4.0 / 3.0) * cur.value;
    out = axpy(out, -1.0 / 3.0, prev.value);
    out = axpy(out, 2.0 * h / 3.0, deriv);
    ensure_finite(out, "predict_bdf2");
    cache.observe_predicted(cur.step + 1, out);
    return out;
}

FeatureVector correct_heun(CacheState& cache, const FeatureVector& predicted, double h, int interval) {
    (void)interval;
    if (!cache.has_anchor_slope())
        throw HistoryError("correct_heun: no stored slope at the latest full compute");
    const auto& recent = cache.recent();
    if (recent.size() < 2)
        throw HistoryError("correct_heun: needs the pre-forecast entry in cache");
    const FeatureVector& current = recent[recent.size() - 2].value;  // F(k); forecast sits at the back
    const FeatureVector slope_new = (1.0 / h) * (predicted - current);
    FeatureVector out = axpy(current, 0.5 * h, cache.anchor_slope());
    out = axpy(out, 0.5 * h, slope_new);
    ensure_finite(out, "correct_heun");
    cache.replace_newest(out);
    return out;
}

FeatureVector foca_step(CacheState& cache, double h, int interval) {
    const FeatureVector predicted = predict_bdf2(cache, h);
    return correct_heun(cache, predicted, h, interval);
}

namespace {

struct Forecast {
    FeatureVector value;
    bool fallback = false;
};

// One skipped-step forecast with the documented degradations: a single prior
// point downgrades the two-step schemes to an Euler step off the anchor
// slope, and to plain reuse when no slope exists yet.
Forecast forecast_step(CacheState& cache, PredictorKind kind, int step, int interval, int order, double h) {
    Forecast f;
    switch (kind) {
        case PredictorKind::Reuse:
            f.value = predict_reuse(cache);
            return f;
        case PredictorKind::Taylor: {
            const int k = step - cache.last_full().step;
            const int avail = static_cast<int>(cache.taylor_history().size()) - 1;
            f.value = predict_taylor(cache, k, interval, order);
            f.fallback = avail < order;
            return f;
        }
        case PredictorKind::Bdf2Only:
        case PredictorKind::FoCa:
            break;
    }
    if (cache.recent().size() >= 2) {
        if (kind == PredictorKind::FoCa && cache.has_anchor_slope()) {
            f.value = foca_step(cache, h, interval);
        } else {
            f.value = predict_bdf2(cache, h);
            f.fallback = kind == PredictorKind::FoCa;  // forecast kept uncorrected
        }
        return f;
    }
    // Single prior point.
    f.fallback = true;
    if (cache.has_anchor_slope()) {
        f.value = axpy(cache.last_full().value, h * (step - cache.last_full().step), cache.anchor_slope());
    } else {
        f.value = predict_reuse(cache);
    }
    cache.observe_predicted(step, f.value);
    return f;
}

}  // namespace

ReferenceRun run_uncached(TrajectorySource& source, int total_steps, uint64_t seed) {
    source.reset(seed);
    ReferenceRun ref;
    ref.features.reserve(static_cast<size_t>(total_steps));
    ref.states.reserve(static_cast<size_t>(total_steps) + 1);
    ref.states.push_back(source.current_state());
    for (int s = 0; s < total_steps; ++s) {
        const FeatureVector f = source.compute_feature(s);
        ref.features.push_back(f);
        source.advance(s, f);
        ref.states.push_back(source.current_state());
    }
    ref.terminal_state = source.current_state();
    return ref;
}

RunPlan plan_from_schedule(const CacheSchedule& schedule) {
    schedule.validate();
    RunPlan plan;
    plan.total_steps = schedule.total_steps;
    plan.interval = schedule.interval;
    plan.is_full = [schedule](int s) { return schedule_is_full_step(schedule, s); };
    return plan;
}

RunReport run_with_plan(TrajectorySource& source, const RunPlan& plan, PredictorKind kind, const RunOptions& options,
                        const ReferenceRun* reference) {
    ReferenceRun local_ref;
    if (reference == nullptr) {
        auto copy = source.clone();
        local_ref = run_uncached(*copy, plan.total_steps, options.seed);
        reference = &local_ref;
    }

    const double h = source.step_size();
    RunReport report;
    report.records.reserve(static_cast<size_t>(plan.total_steps));

    source.reset(options.seed);
    CacheState cache(h, std::max(2, options.taylor_order + 1));
    int evals = 0;

    for (int s = 0; s < plan.total_steps; ++s) {
        StepRecord rec;
        rec.step_index = s;
        rec.truth = reference->features[static_cast<size_t>(s)];
        FeatureVector used;
        if (plan.is_full(s)) {
            rec.is_full = true;
            used = source.compute_feature(s);
            cache.observe_full(s, used);
            ++evals;
        } else {
            Forecast f = forecast_step(cache, kind, s, plan.interval, options.taylor_order, h);
            used = f.value;
            rec.fallback_used = f.fallback;
            if (f.fallback)
                ++report.fallback_steps;
            rec.predicted = used;
            const FlaggedError err = relative_error_flagged(used, rec.truth);
            rec.rel_error = relative_error(used, rec.truth);
            rec.degenerate_truth = err.degenerate;
        }
        if (!used.all_finite()) {
            report.aborted = true;
            report.abort_step = s;
            report.records.push_back(std::move(rec));
            break;
        }
        source.advance(s, used);
        rec.state_deviation = norm2(source.current_state() - reference->states[static_cast<size_t>(s) + 1]);
        report.records.push_back(std::move(rec));
        report.used_features.push_back(std::move(used));
    }

    // Trajectory-shape diagnostics are properties of the reference run.
    const int n = static_cast<int>(reference->features.size());
    for (auto& rec : report.records) {
        const int s = rec.step_index;
        if (s >= 1 && s + 1 < n)
            rec.lte = local_truncation_error(reference->features, h, s);
        if (n >= 3)
            rec.stiffness_index = stiffness_index(reference->features, h, s, options.stiffness_window);
    }

    report.evaluation_count = evals;
    report.acceleration_ratio =
        evals > 0 ? static_cast<double>(plan.total_steps) / evals : 1.0;
    if (!report.aborted)
        report.terminal_sample_deviation = norm2(source.current_state() - reference->terminal_state);
    return report;
}

RunReport run_cached_sampler(TrajectorySource& source, const CacheSchedule& schedule, PredictorKind kind,
                             const RunOptions& options, const ReferenceRun* reference) {
    return run_with_plan(source, plan_from_schedule(schedule), kind, options, reference);
}

}  // namespace foca
