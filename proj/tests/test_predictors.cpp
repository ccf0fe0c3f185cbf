#include <doctest.h>

#include <cmath>
#include <functional>

#include "foca/diagnostics.hpp"
#include "foca/predictors.hpp"

using namespace foca;

namespace {

// Iterate a caching schedule over a given scalar-valued trajectory: full
// steps read the exact value, skipped steps use the predictor. Returns the
// per-step values the scheme would serve.
std::vector<FeatureVector> serve_trajectory(const std::vector<FeatureVector>& truth, const CacheSchedule& schedule,
                                            PredictorKind kind, int m, double h) {
    CacheState cache(h, m + 1);
    std::vector<FeatureVector> served;
    served.reserve(truth.size());
    for (int s = 0; s < schedule.total_steps; ++s) {
        if (schedule_is_full_step(schedule, s)) {
            cache.observe_full(s, truth[static_cast<size_t>(s)]);
            served.push_back(truth[static_cast<size_t>(s)]);
            continue;
        }
        FeatureVector pred;
        switch (kind) {
            case PredictorKind::Reuse:
                pred = predict_reuse(cache);
                break;
            case PredictorKind::Taylor:
                pred = predict_taylor(cache, s - cache.last_full().step, schedule.interval, m);
                break;
            case PredictorKind::Bdf2Only:
                pred = predict_bdf2(cache, h);
                break;
            case PredictorKind::FoCa:
                pred = foca_step(cache, h, schedule.interval);
                break;
        }
        served.push_back(pred);
    }
    return served;
}

std::vector<FeatureVector> sample_scalar(const std::function<double(double)>& f, int steps, double h) {
    std::vector<FeatureVector> out;
    out.reserve(static_cast<size_t>(steps));
    for (int s = 0; s < steps; ++s)
        out.push_back(FeatureVector{f(s * h)});
    return out;
}

double max_skip_error(const std::vector<FeatureVector>& truth, const std::vector<FeatureVector>& served,
                      const CacheSchedule& schedule) {
    double m = 0.0;
    for (int s = 0; s < schedule.total_steps; ++s)
        if (!schedule_is_full_step(schedule, s))
            m = std::max(m, norm2(served[static_cast<size_t>(s)] - truth[static_cast<size_t>(s)]));
    return m;
}

}  // namespace

TEST_CASE("predict_reuse returns the latest full compute") {
    CacheState cache(1.0, 3);
    CHECK_THROWS_AS(predict_reuse(cache), HistoryError);
    cache.observe_full(0, FeatureVector{1.0, 2.0, 3.0});
    const FeatureVector r = predict_reuse(cache);
    CHECK(r == FeatureVector{1.0, 2.0, 3.0});
}

TEST_CASE("reuse error on linear and constant trajectories") {
    const CacheSchedule schedule{5, 26, 2};
    const double b = 0.7, h = 1.0;
    const auto linear = sample_scalar([b](double t) { return b * t; }, 26, h);
    const auto served = serve_trajectory(linear, schedule, PredictorKind::Reuse, 1, h);
    for (int s = 0; s < schedule.total_steps; ++s) {
        if (schedule_is_full_step(schedule, s))
            continue;
        int last_full = s;
        while (!schedule_is_full_step(schedule, last_full))
            --last_full;
        const int k = s - last_full;
        const double err = norm2(served[static_cast<size_t>(s)] - linear[static_cast<size_t>(s)]);
        CHECK(err == doctest::Approx(std::abs(b) * h * k).epsilon(1e-12));
    }

    const auto constant = sample_scalar([](double) { return 3.25; }, 26, h);
    const auto cserved = serve_trajectory(constant, schedule, PredictorKind::Reuse, 1, h);
    CHECK(max_skip_error(constant, cserved, schedule) == 0.0);
}

TEST_CASE("finite_differences: constants, quadratic samples, first difference") {
    const std::vector<FeatureVector> flat{FeatureVector{5.0}, FeatureVector{5.0}, FeatureVector{5.0}};
    const auto dflat = finite_differences(flat, 2);
    REQUIRE(dflat.size() == 2);
    CHECK(dflat[0][0] == 0.0);
    CHECK(dflat[1][0] == 0.0);

    const std::vector<FeatureVector> quad{FeatureVector{0.0}, FeatureVector{1.0}, FeatureVector{4.0}};
    const auto dquad = finite_differences(quad, 2);
    CHECK(dquad[0][0] == doctest::Approx(3.0));
    CHECK(dquad[1][0] == doctest::Approx(2.0));

    const std::vector<FeatureVector> two{FeatureVector{1.0}, FeatureVector{4.0}};
    const auto dtwo = finite_differences(two, 1);
    CHECK(dtwo[0][0] == doctest::Approx(3.0));

    // Insufficient history degrades to the largest representable order.
    const auto reduced = finite_differences(two, 5);
    CHECK(reduced.size() == 1);
    CHECK_THROWS_AS(finite_differences({}, 1), HistoryError);
}

TEST_CASE("predict_taylor is exact on constants, affine, and quadratics") {
    // Constant trajectory: exact for all m, k.
    CacheState cache(1.0, 3);
    cache.observe_full(0, FeatureVector{2.0});
    cache.observe_full(5, FeatureVector{2.0});
    cache.observe_full(10, FeatureVector{2.0});
    for (int k = 1; k <= 4; ++k)
        for (int m = 1; m <= 2; ++m)
            CHECK(predict_taylor(cache, k, 5, m)[0] == doctest::Approx(2.0).epsilon(1e-12));

    // Affine with m=1.
    CacheState affine(1.0, 2);
    auto line = [](double t) { return 1.0 + 0.5 * t; };
    affine.observe_full(0, FeatureVector{line(0)});
    affine.observe_full(5, FeatureVector{line(5)});
    for (int k = 1; k <= 4; ++k)
        CHECK(predict_taylor(affine, k, 5, 1)[0] == doctest::Approx(line(5 + k)).epsilon(1e-12));

    // Quadratic full-compute samples with m=2: exact interpolation at all k.
    CacheState quad(1.0, 3);
    auto q = [](double t) { return 0.3 * t * t - 1.2 * t + 0.5; };
    quad.observe_full(0, FeatureVector{q(0)});
    quad.observe_full(5, FeatureVector{q(5)});
    quad.observe_full(10, FeatureVector{q(10)});
    for (int k = 1; k <= 4; ++k) {
        const double pred = predict_taylor(quad, k, 5, 2)[0];
        CHECK(std::abs(pred - q(10 + k)) < 1e-10);
    }

    // Warmup spacing differs from N: the node positions carry the gap.
    CacheState mixed(1.0, 3);
    mixed.observe_full(0, FeatureVector{q(0)});
    mixed.observe_full(1, FeatureVector{q(1)});
    mixed.observe_full(6, FeatureVector{q(6)});
    for (int k = 1; k <= 4; ++k)
        CHECK(std::abs(predict_taylor(mixed, k, 5, 2)[0] - q(6 + k)) < 1e-10);

    CHECK_THROWS_AS(predict_taylor(quad, 0, 5, 2), RangeError);
    CacheState empty(1.0, 3);
    CHECK_THROWS_AS(predict_taylor(empty, 1, 5, 2), HistoryError);
}

TEST_CASE("estimate_derivative uses the actual spacing") {
    CacheState cache(1.0, 3);
    cache.observe_full(0, FeatureVector{1.0});
    CHECK_THROWS_AS(estimate_derivative(cache, 1.0), HistoryError);

    cache.observe_full(1, FeatureVector{1.0});
    CHECK(estimate_derivative(cache, 1.0)[0] == 0.0);  // equal entries

    CacheState pair(1.0, 3);
    pair.observe_full(0, FeatureVector{0.0});
    pair.observe_full(1, FeatureVector{2.0});
    CHECK(estimate_derivative(pair, 1.0)[0] == doctest::Approx(2.0));

    CacheState gap(0.5, 3);
    gap.observe_full(0, FeatureVector{0.0});
    gap.observe_full(4, FeatureVector{2.0});  // spacing 4 * h
    CHECK(estimate_derivative(gap, 0.5)[0] == doctest::Approx(1.0));
}

TEST_CASE("estimate_derivative is first-order accurate") {
    auto err_at = [](double h) {
        CacheState cache(h, 3);
        cache.observe_full(0, FeatureVector{std::exp(-0.0)});
        cache.observe_full(1, FeatureVector{std::exp(-h)});
        return std::abs(estimate_derivative(cache, h)[0] - (-std::exp(-h)));
    };
    const double e1 = err_at(0.1), e2 = err_at(0.05);
    const double order = std::log2(e1 / e2);
    CHECK(order > 0.8);
    CHECK(order < 1.2);
}

TEST_CASE("predict_bdf2 formula cases") {
    // Constant trajectory: exact.
    CacheState c(1.0, 3);
    c.observe_full(0, FeatureVector{4.0});
    c.observe_full(1, FeatureVector{4.0});
    CHECK(predict_bdf2(c, 1.0)[0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(c.recent().back().step == 2);  // forecast entered the cache

    // Affine trajectory F(t) = t: next value exactly.
    CacheState a(1.0, 3);
    a.observe_full(3, FeatureVector{3.0});
    a.observe_full(4, FeatureVector{4.0});
    CHECK(predict_bdf2(a, 1.0)[0] == doctest::Approx(5.0).epsilon(1e-12));

    CacheState empty(1.0, 3);
    empty.observe_full(0, FeatureVector{1.0});
    CHECK_THROWS_AS(predict_bdf2(empty, 1.0), HistoryError);
}

TEST_CASE("one-step forecast error shrinks with h on smooth decay") {
    auto one_step_err = [](double h) {
        CacheState cache(h, 3);
        cache.observe_full(0, FeatureVector{std::exp(0.0 * h)});
        cache.observe_full(1, FeatureVector{std::exp(-1.0 * h)});
        const FeatureVector pred = predict_bdf2(cache, h);
        return std::abs(pred[0] - std::exp(-2.0 * h));
    };
    const double e1 = one_step_err(0.1);
    const double e2 = one_step_err(0.05);
    const double e3 = one_step_err(0.025);
    CHECK(e2 < e1);
    CHECK(e3 < e2);
    // The derivative substitution makes this a second-order forecast.
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.15));
    CHECK(std::log2(e2 / e3) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("correct_heun on constant and affine trajectories") {
    CacheState c(1.0, 3);
    c.observe_full(0, FeatureVector{4.0});
    c.observe_full(1, FeatureVector{4.0});
    const FeatureVector pc = predict_bdf2(c, 1.0);
    CHECK(correct_heun(c, pc, 1.0, 5)[0] == doctest::Approx(4.0).epsilon(1e-12));

    const double b = -0.8;
    CacheState a(1.0, 3);
    a.observe_full(0, FeatureVector{0.0});
    a.observe_full(1, FeatureVector{b});
    const FeatureVector pa = predict_bdf2(a, 1.0);
    const FeatureVector corrected = correct_heun(a, pa, 1.0, 5);
    CHECK(corrected[0] == doctest::Approx(2.0 * b).epsilon(1e-12));
    CHECK(a.recent().back().value == corrected);  // replaced in place

    CacheState no_anchor(1.0, 3);
    no_anchor.observe_full(0, FeatureVector{1.0});
    no_anchor.observe_predicted(1, FeatureVector{1.0});
    const FeatureVector p = predict_bdf2(no_anchor, 1.0);
    CHECK_THROWS_AS(correct_heun(no_anchor, p, 1.0, 5), HistoryError);
}

TEST_CASE("heun correction beats the raw forecast near the stability edge") {
    // dF/dt = lambda F with lambda h = -1.8. The second interval ends after
    // 10 consecutive skipped steps; the raw forecast has oscillated hard by
    // then while the corrected one is pulled back toward the anchor.
    const double h = 1.0, lambda = -1.8;
    const int steps = 24;
    const auto truth = sample_scalar([lambda](double t) { return std::exp(lambda * t); }, steps, h);
    const CacheSchedule schedule{11, steps, 2};
    const auto bdf2 = serve_trajectory(truth, schedule, PredictorKind::Bdf2Only, 1, h);
    const auto foca = serve_trajectory(truth, schedule, PredictorKind::FoCa, 1, h);
    const double be = norm2(bdf2.back() - truth.back());
    const double fe = norm2(foca.back() - truth.back());
    CHECK(fe < be);
}

TEST_CASE("foca_step on constant trajectories and exactness tiers") {
    CacheState c(1.0, 3);
    c.observe_full(0, FeatureVector{7.0});
    c.observe_full(1, FeatureVector{7.0});
    CHECK(foca_step(c, 1.0, 5)[0] == doctest::Approx(7.0).epsilon(1e-12));

    // Exactness tiers over a full served schedule, tolerance 1e-9.
    const CacheSchedule schedule{5, 32, 2};
    const double h = 1.0;
    const auto constant = sample_scalar([](double) { return -2.5; }, 32, h);
    const auto affine = sample_scalar([](double t) { return 0.3 * t - 1.0; }, 32, h);
    const auto quad = sample_scalar([](double t) { return 0.02 * t * t - 0.3 * t + 1.0; }, 32, h);

    for (PredictorKind kind :
         {PredictorKind::Reuse, PredictorKind::Taylor, PredictorKind::Bdf2Only, PredictorKind::FoCa}) {
        const auto served = serve_trajectory(constant, schedule, kind, 2, h);
        CHECK(max_skip_error(constant, served, schedule) < 1e-9);
    }
    for (PredictorKind kind : {PredictorKind::Taylor, PredictorKind::Bdf2Only, PredictorKind::FoCa}) {
        const auto served = serve_trajectory(affine, schedule, kind, 1, h);
        CHECK(max_skip_error(affine, served, schedule) < 1e-9);
    }
    {
        const auto served = serve_trajectory(affine, schedule, PredictorKind::Reuse, 1, h);
        CHECK(max_skip_error(affine, served, schedule) > 1e-3);  // reuse is not exact on affine
    }
    {
        const auto served = serve_trajectory(quad, schedule, PredictorKind::Taylor, 2, h);
        CHECK(max_skip_error(quad, served, schedule) < 1e-9);
    }
}

TEST_CASE("terminal error ordering on slow exponential decay") {
    // On a smooth decay the order-2 extrapolation is the sharpest scheme;
    // both forecasting schemes beat plain reuse while the trajectory still
    // moves. (The full reuse > taylor > foca separation needs the stiff
    // late-stage dynamics of the sampler runs; see the acceptance suite.)
    const CacheSchedule schedule{5, 50, 2};
    const double h = 1.0;
    const auto truth = sample_scalar([](double t) { return std::exp(-0.05 * t); }, 50, h);
    const auto reuse = serve_trajectory(truth, schedule, PredictorKind::Reuse, 2, h);
    const auto taylor = serve_trajectory(truth, schedule, PredictorKind::Taylor, 2, h);
    const auto foca = serve_trajectory(truth, schedule, PredictorKind::FoCa, 2, h);
    const size_t last = 49;
    const double re = norm2(reuse[last] - truth[last]);
    const double te = norm2(taylor[last] - truth[last]);
    const double fe = norm2(foca[last] - truth[last]);
    CHECK(te < re);
    CHECK(fe < re);
}

TEST_CASE("run_cached_sampler: N=1 is bit-identical to the uncached run") {
    LinearSystem sys = LinearSystem::diagonal({-0.4, -0.1}, FeatureVector{1.0, 2.0});
    LinearSource source(sys, 1.0);
    auto ref_src = source.clone();
    const ReferenceRun ref = run_uncached(*ref_src, 20, 1);
    for (PredictorKind kind :
         {PredictorKind::Reuse, PredictorKind::Taylor, PredictorKind::Bdf2Only, PredictorKind::FoCa}) {
        auto src = source.clone();
        const RunReport report = run_cached_sampler(*src, {1, 20, 0}, kind, {});
        CHECK(report.evaluation_count == 20);
        CHECK(report.terminal_sample_deviation == 0.0);
        for (int s = 0; s < 20; ++s)
            CHECK(report.used_features[static_cast<size_t>(s)] == ref.features[static_cast<size_t>(s)]);
    }
}

TEST_CASE("run_cached_sampler evaluation accounting and finite deviation") {
    LinearSystem sys = LinearSystem::diagonal({-0.4}, FeatureVector{1.0});
    LinearSource source(sys, 1.0);
    const CacheSchedule schedule{5, 50, 2};
    const RunReport report = run_cached_sampler(source, schedule, PredictorKind::FoCa, {});
    CHECK(report.evaluation_count == evaluation_count(schedule));
    CHECK(report.acceleration_ratio == doctest::Approx(acceleration_ratio(schedule)));
    CHECK(std::isfinite(report.terminal_sample_deviation));
    CHECK_FALSE(report.aborted);
    int skipped = 0;
    for (const auto& rec : report.records) {
        if (rec.is_full) {
            CHECK(rec.rel_error == 0.0);
            CHECK_FALSE(rec.predicted.has_value());
        } else {
            ++skipped;
            CHECK(rec.predicted.has_value());
        }
    }
    CHECK(skipped == schedule.total_steps - report.evaluation_count);
}

TEST_CASE("history fallback degrades gracefully without warmup") {
    // With no warmup the first skipped step sees a single cached point; the
    // two-step schemes degrade instead of erroring further into the run.
    LinearSystem sys = LinearSystem::diagonal({-0.4}, FeatureVector{1.0});
    LinearSource source(sys, 1.0);
    const CacheSchedule schedule{6, 24, 0};
    for (PredictorKind kind : {PredictorKind::Bdf2Only, PredictorKind::FoCa}) {
        auto src = source.clone();
        const RunReport report = run_cached_sampler(*src, schedule, kind, {});
        CHECK_FALSE(report.aborted);
        CHECK(report.fallback_steps > 0);
    }
}
