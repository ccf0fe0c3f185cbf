#include <doctest.h>

#include <cmath>

#include "foca/cache_schedule.hpp"
#include "foca/cache_state.hpp"
#include "foca/feature.hpp"
#include "foca/rng.hpp"
#include "foca/time_grid.hpp"

using namespace foca;

TEST_CASE("schedule_is_full_step basic patterns") {
    CHECK(schedule_is_full_step({1, 12, 0}, 7));  // N=1: every step full

    // N=5, warmup=2: full at 0,1,2,7 within the first 8 steps
    CacheSchedule s{5, 12, 2};
    std::vector<int> fulls;
    for (int i = 0; i < 8; ++i)
        if (schedule_is_full_step(s, i))
            fulls.push_back(i);
    CHECK(fulls == std::vector<int>{0, 1, 2, 7});

    CHECK_FALSE(schedule_is_full_step({3, 12, 0}, 4));  // 4 mod 3 != 0

    CHECK_THROWS_AS(schedule_is_full_step({3, 12, 0}, 12), RangeError);
    CHECK_THROWS_AS(schedule_is_full_step({3, 12, 0}, -1), RangeError);
}

TEST_CASE("evaluation_count and acceleration ratio") {
    CHECK(evaluation_count({5, 50, 0}) == 10);
    CHECK(acceleration_ratio({5, 50, 0}) == doctest::Approx(5.0));

    CHECK(evaluation_count({7, 50, 1}) == 8);  // 1 + ceil(49/7)
    CHECK(acceleration_ratio({7, 50, 1}) == doctest::Approx(6.25));

    CHECK(evaluation_count({1, 50, 0}) == 50);
    CHECK(acceleration_ratio({1, 50, 0}) == doctest::Approx(1.0));
}

TEST_CASE("schedule counting is consistent") {
    for (int n : {1, 2, 3, 5, 7}) {
        for (int warmup : {0, 1, 2, 5, 60}) {
            for (int total : {1, 10, 50}) {
                CacheSchedule s{n, total, warmup};
                int fulls = 0;
                for (int i = 0; i < total; ++i)
                    fulls += schedule_is_full_step(s, i) ? 1 : 0;
                CAPTURE(n);
                CAPTURE(warmup);
                CAPTURE(total);
                CHECK(fulls == evaluation_count(s));
                CHECK(evaluation_count(s) <= total);
                // Equality exactly when no step can be skipped: N = 1 or at
                // most one step past the warmup.
                if (n == 1 || warmup >= total - 1)
                    CHECK(evaluation_count(s) == total);
                else
                    CHECK(evaluation_count(s) < total);
            }
        }
    }
}

TEST_CASE("feature arithmetic is exact for representable inputs") {
    CounterRng rng(7, 1);
    for (int trial = 0; trial < 50; ++trial) {
        FeatureVector a = FeatureVector::zeros(8);
        FeatureVector b = FeatureVector::zeros(8);
        for (int i = 0; i < 8; ++i) {
            // Power-of-two magnitudes in a narrow range: no rounding in +/-.
            a[i] = std::ldexp(1.0, static_cast<int>(rng.next_u64() % 5));
            b[i] = std::ldexp(1.0, static_cast<int>(rng.next_u64() % 5));
        }
        const FeatureVector sum = a + b;
        const FeatureVector back = sum - b;
        for (int i = 0; i < 8; ++i)
            CHECK(back[i] == a[i]);  // bitwise
        const FeatureVector scaled = 2.0 * a;
        for (int i = 0; i < 8; ++i)
            CHECK(0.5 * scaled[i] == a[i]);
    }
}

TEST_CASE("feature dim mismatch and finiteness checks") {
    FeatureVector a{1.0, 2.0};
    FeatureVector b{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(a + b, RangeError);
    FeatureVector bad{1.0, std::nan("")};
    CHECK_FALSE(bad.all_finite());
    CHECK_THROWS_AS(ensure_finite(bad, "test"), NumericError);
}

TEST_CASE("time grid owns the step/timestep mapping") {
    TimeGrid g{50, 50, 1.0};
    g.validate();
    CHECK(g.timestep(0) == 50);
    CHECK(g.timestep(49) == 1);
    CHECK(g.step_for_timestep(10) == 40);
    for (int s = 1; s < g.num_steps; ++s)
        CHECK(g.timestep(s) < g.timestep(s - 1));
    CHECK_THROWS_AS(g.timestep(50), RangeError);
    CHECK_THROWS_AS((TimeGrid{50, 50, -1.0}).validate(), ConfigError);
}

TEST_CASE("cache state bookkeeping") {
    CacheState cache(1.0, 3);
    CHECK_FALSE(cache.has_last_full());
    CHECK_THROWS_AS(cache.last_full(), HistoryError);

    cache.observe_full(0, FeatureVector{1.0});
    CHECK(cache.has_last_full());
    CHECK_FALSE(cache.has_anchor_slope());
    CHECK(cache.recent().size() == 1);

    cache.observe_full(1, FeatureVector{3.0});
    CHECK(cache.has_anchor_slope());
    CHECK(cache.anchor_slope()[0] == doctest::Approx(2.0));
    CHECK(cache.recent().size() == 2);

    cache.observe_predicted(2, FeatureVector{5.0});
    CHECK(cache.recent().size() == 2);  // capped at two entries
    CHECK(cache.recent().back().step == 2);
    CHECK(cache.taylor_history().size() == 2);  // predictions stay out

    cache.observe_full(6, FeatureVector{13.0});
    // Slope over the 5-step gap: (13 - 3)/5
    CHECK(cache.anchor_slope()[0] == doctest::Approx(2.0));
    CHECK(cache.taylor_history().size() == 3);

    cache.observe_full(11, FeatureVector{23.0});
    CHECK(cache.taylor_history().size() == 3);  // capacity m+1
    CHECK(cache.taylor_history().front().step == 1);
}

TEST_CASE("counter rng is deterministic and portable") {
    CounterRng a(42, 0), b(42, 0), c(43, 0), d(42, 1);
    for (int i = 0; i < 100; ++i)
        CHECK(a.next_u64() == b.next_u64());
    CHECK(c.next_u64() != d.next_u64());
    CounterRng g(1, 2);
    for (int i = 0; i < 1000; ++i) {
        const double u = g.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CounterRng h(1, 2);
    double mean = 0.0;
    for (int i = 0; i < 10000; ++i)
        mean += h.next_gaussian();
    CHECK(std::abs(mean / 10000.0) < 0.05);
}
