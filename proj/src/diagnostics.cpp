#include "foca/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "foca/predictors.hpp"

namespace foca {

double relative_error(const FeatureVector& pred, const FeatureVector& truth) {
    check_same_dim(pred, truth, "relative_error");
    return norm2(pred - truth) / (norm2(truth) + 1e-12);
}

FlaggedError relative_error_flagged(const FeatureVector& pred, const FeatureVector& truth) {
    check_same_dim(pred, truth, "relative_error");
    FlaggedError out;
    const double tn = norm2(truth);
    const double abs_err = norm2(pred - truth);
    if (tn < 1e-12) {
        out.degenerate = true;
        out.value = abs_err;
    } else {
        out.value = abs_err / (tn + 1e-12);
    }
    return out;
}

double local_truncation_error(const std::vector<FeatureVector>& trajectory, double h, int at) {
    const int n = static_cast<int>(trajectory.size());
    if (at < 1 || at + 1 >= n)
        throw BoundaryError("local_truncation_error: step " + std::to_string(at) + " lacks neighbors");
    const size_t i = static_cast<size_t>(at);
    FeatureVector deriv_next = (at + 2 < n) ? (0.5 / h) * (trajectory[i + 2] - trajectory[i])
                                            : (1.0 / h) * (trajectory[i + 1] - trajectory[i]);
    FeatureVector step = (4.0 / 3.0) * trajectory[i];
    step = axpy(step, -1.0 / 3.0, trajectory[i - 1]);
    step = axpy(step, 2.0 * h / 3.0, deriv_next);
    return norm2(trajectory[i + 1] - step);
}

double stiffness_index(const std::vector<FeatureVector>& trajectory, double h, int at, int window) {
    const int n = static_cast<int>(trajectory.size());
    if (n < 3)
        throw BoundaryError("stiffness_index: trajectory too short");
    if (window < 1)
        throw RangeError("stiffness_index: window must be >= 1");
    // Slope-change terms dv_k exist for k in [0, n-3].
    const int lo = std::max(0, at - window);
    const int hi = std::min(n - 3, at + window);
    if (lo > hi)
        throw BoundaryError("stiffness_index: no window points around step " + std::to_string(at));
    double max_dv = 0.0;
    double mean_df = 0.0;
    int count = 0;
    for (int k = lo; k <= hi; ++k) {
        const size_t i = static_cast<size_t>(k);
        const FeatureVector df0 = trajectory[i + 1] - trajectory[i];
        const FeatureVector df1 = trajectory[i + 2] - trajectory[i + 1];
        max_dv = std::max(max_dv, norm2(df1 - df0) / h);
        mean_df += norm2(df0);
        ++count;
    }
    mean_df /= count;
    if (mean_df == 0.0)
        return 0.0;  // frozen trajectory
    return max_dv / mean_df;
}

Prop1Report verify_proposition1(const LinearSystem& system, double h, int warmup, int max_k, PredictorKind kind) {
    Prop1Report report;
    report.rho = system.contraction_rho(h);
    if (report.rho >= 1.0)
        throw ConfigError("verify_proposition1: system not contractive, rho = " + std::to_string(report.rho));
    if (warmup < 2)
        throw ConfigError("verify_proposition1: warmup must be >= 2");
    if (max_k < 0)
        throw ConfigError("verify_proposition1: max_k must be >= 0");

    const int total = warmup + max_k;
    LinearSource source(system, h);
    auto ref_source = source.clone();
    const ReferenceRun ref = run_uncached(*ref_source, total, /*seed=*/1);

    source.reset(1);
    CacheState cache(h, 3);
    const double slack = 1.05;
    double tau = 0.0;
    for (int s = 0; s < total; ++s) {
        FeatureVector used;
        if (s < warmup) {
            used = source.compute_feature(s);
            cache.observe_full(s, used);
        } else {
            switch (kind) {
                case PredictorKind::Reuse:
                    used = predict_reuse(cache);
                    break;
                case PredictorKind::Taylor:
                    used = predict_taylor(cache, s - cache.last_full().step, max_k + 1, 2);
                    break;
                case PredictorKind::Bdf2Only:
                    used = predict_bdf2(cache, h);
                    break;
                case PredictorKind::FoCa:
                    used = foca_step(cache, h, max_k + 1);
                    break;
            }
            const FeatureVector after_forecast = source.one_step_map(used);
            const FeatureVector after_truth = source.one_step_map(source.current_state());
            tau = std::max(tau, norm2(after_forecast - after_truth));
        }
        source.advance(s, used);
        if (s >= warmup) {
            const double err = norm2(source.current_state() - ref.states[static_cast<size_t>(s) + 1]);
            report.errors.push_back(err);
        }
    }

    report.tau_max = tau;
    report.sup_bound = report.rho < 1.0 ? tau / (1.0 - report.rho) : 0.0;
    for (size_t i = 0; i < report.errors.size(); ++i) {
        const double k = static_cast<double>(i) + 1.0;
        const double geom = report.rho == 0.0 ? 1.0 : (1.0 - std::pow(report.rho, k)) / (1.0 - report.rho);
        const double bound = geom * tau;
        report.bounds.push_back(bound);
        const bool ok = report.errors[i] <= bound * slack + 1e-15;
        report.bound_ok.push_back(ok);
        if (!ok)
            report.all_bounds_ok = false;
        if (report.errors[i] > report.sup_bound * slack + 1e-15)
            report.sup_ok = false;
    }

    // k-independence marker: strictly increasing error over k in [1, 10].
    const size_t growth_span = std::min<size_t>(10, report.errors.size());
    bool increasing = growth_span >= 2;
    for (size_t i = 1; i < growth_span; ++i)
        if (!(report.errors[i] > report.errors[i - 1]))
            increasing = false;
    report.error_increasing_in_k = increasing;

    report.pass = report.all_bounds_ok && report.sup_ok;
    return report;
}

std::vector<HorizonCurve> multi_horizon_forecast_error(TrajectorySource& source, const std::vector<int>& warm_steps,
                                                       int horizon, const std::vector<PredictorKind>& kinds, int m,
                                                       uint64_t seed) {
    std::vector<HorizonCurve> curves;
    if (horizon < 0)
        throw RangeError("multi_horizon_forecast_error: horizon must be >= 0");
    for (int warm : warm_steps) {
        if (warm < 2)
            throw ConfigError("multi_horizon_forecast_error: warm steps must be >= 2");
        const int total = warm + horizon;
        auto ref_source = source.clone();
        const ReferenceRun ref = run_uncached(*ref_source, total, seed);
        for (PredictorKind kind : kinds) {
            HorizonCurve curve;
            curve.warm_steps = warm;
            curve.kind = kind;
            if (horizon > 0) {
                RunPlan plan;
                plan.total_steps = total;
                plan.interval = horizon + 1;
                plan.is_full = [warm](int s) { return s < warm; };
                auto run_source = source.clone();
                RunOptions opts;
                opts.taylor_order = m;
                opts.seed = seed;
                const RunReport report = run_with_plan(*run_source, plan, kind, opts, &ref);
                for (int s = warm; s < static_cast<int>(report.records.size()); ++s) {
                    const StepRecord& rec = report.records[static_cast<size_t>(s)];
                    if (rec.is_full || !rec.predicted)
                        continue;
                    HorizonPoint p;
                    p.step = s;
                    p.rel_feature_error = rec.rel_error;
                    p.abs_feature_error = norm2(*rec.predicted - rec.truth);
                    p.abs_state_deviation = rec.state_deviation;
                    curve.points.push_back(p);
                }
            }
            curves.push_back(std::move(curve));
        }
    }
    return curves;
}

double median_pairwise_distance(const std::vector<FeatureVector>& a, const std::vector<FeatureVector>& b) {
    std::vector<const FeatureVector*> pooled;
    pooled.reserve(a.size() + b.size());
    for (const auto& x : a)
        pooled.push_back(&x);
    for (const auto& x : b)
        pooled.push_back(&x);
    std::vector<double> dists;
    dists.reserve(pooled.size() * (pooled.size() - 1) / 2);
    for (size_t i = 0; i < pooled.size(); ++i)
        for (size_t j = i + 1; j < pooled.size(); ++j)
            dists.push_back(norm2(*pooled[i] - *pooled[j]));
    if (dists.empty())
        return 1.0;
    const size_t mid = dists.size() / 2;
    std::nth_element(dists.begin(), dists.begin() + static_cast<long>(mid), dists.end());
    const double med = dists[mid];
    return med > 0.0 ? med : 1.0;
}

double mmd_sample_quality(const std::vector<FeatureVector>& samples_a, const std::vector<FeatureVector>& samples_b,
                          double bandwidth) {
    if (samples_a.size() < 2 || samples_b.size() < 2)
        throw ConfigError("mmd_sample_quality: both sample sets need at least 2 points");
    const int dim = samples_a.front().dim();
    for (const auto& x : samples_a)
        if (x.dim() != dim)
            throw RangeError("mmd_sample_quality: inconsistent dims in samples_a");
    for (const auto& x : samples_b)
        if (x.dim() != dim)
            throw RangeError("mmd_sample_quality: inconsistent dims in samples_b");

    const double bw = bandwidth > 0.0 ? bandwidth : median_pairwise_distance(samples_a, samples_b);
    const double inv = 1.0 / (2.0 * bw * bw);
    auto kernel = [inv](const FeatureVector& x, const FeatureVector& y) {
        const FeatureVector d = x - y;
        double s = 0.0;
        for (int i = 0; i < d.dim(); ++i)
            s += d[i] * d[i];
        return std::exp(-s * inv);
    };

    const double m = static_cast<double>(samples_a.size());
    const double n = static_cast<double>(samples_b.size());
    double kaa = 0.0, kbb = 0.0, kab = 0.0;
    for (size_t i = 0; i < samples_a.size(); ++i)
        for (size_t j = 0; j < samples_a.size(); ++j)
            if (i != j)
                kaa += kernel(samples_a[i], samples_a[j]);
    for (size_t i = 0; i < samples_b.size(); ++i)
        for (size_t j = 0; j < samples_b.size(); ++j)
            if (i != j)
                kbb += kernel(samples_b[i], samples_b[j]);
    for (const auto& x : samples_a)
        for (const auto& y : samples_b)
            kab += kernel(x, y);
    return kaa / (m * (m - 1.0)) + kbb / (n * (n - 1.0)) - 2.0 * kab / (m * n);
}

}  // namespace foca
