#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "foca/denoiser.hpp"
#include "foca/diffusion.hpp"
#include "foca/linear_system.hpp"
#include "foca/sources.hpp"

using namespace foca;

TEST_CASE("exact_solution: zero dynamics, scalar decay, rotation") {
    LinearSystem zero = LinearSystem::diagonal({0.0, 0.0}, FeatureVector{2.0, -1.0});
    const FeatureVector f = exact_solution(zero, 3.7);
    CHECK(f[0] == doctest::Approx(2.0));
    CHECK(f[1] == doctest::Approx(-1.0));

    LinearSystem decay = LinearSystem::diagonal({-1.0}, FeatureVector{1.0});
    CHECK(exact_solution(decay, 1.0)[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

    LinearSystem rot = LinearSystem::rotation(1.0, FeatureVector{1.0, 0.0});
    // A = [[0,1],[-1,0]]: F(t) = (cos t, -sin t)
    const double half_pi = 1.5707963267948966;
    const FeatureVector r = exact_solution(rot, half_pi);
    CHECK(std::abs(r[0] - 0.0) < 1e-12);
    CHECK(std::abs(r[1] - (-1.0)) < 1e-12);
}

TEST_CASE("exact_solution semigroup property") {
    LinearSystem sys = LinearSystem::two_scale(-2.0, -0.3, FeatureVector{1.0, 1.0});
    for (double t1 : {0.3, 1.1}) {
        for (double t2 : {0.5, 2.4}) {
            const FeatureVector once = exact_solution(sys, t1 + t2);
            LinearSystem shifted = sys;
            shifted.initial_state = exact_solution(sys, t1);
            const FeatureVector twice = exact_solution(shifted, t2);
            CHECK(norm2(once - twice) < 1e-10);
        }
    }
}

TEST_CASE("exact_solution overflow reports an error") {
    LinearSystem blow = LinearSystem::diagonal({800.0}, FeatureVector{1.0});
    CHECK_THROWS_AS(exact_solution(blow, 10.0), NumericError);
    CHECK_THROWS_AS(exact_solution(blow, -1.0), RangeError);
}

TEST_CASE("contraction_rho of the one-step map") {
    LinearSystem sys = LinearSystem::diagonal({-0.5}, FeatureVector{1.0});
    CHECK(sys.contraction_rho(1.0) == doctest::Approx(0.5));
    LinearSystem rot = LinearSystem::rotation(1.0, FeatureVector{1.0, 0.0});
    CHECK(rot.contraction_rho(0.5) == doctest::Approx(std::sqrt(1.25)));
    LinearSystem stiff = LinearSystem::two_scale(-100.0, -1.0, FeatureVector{1.0, 1.0});
    CHECK(stiff.contraction_rho(1.0) == doctest::Approx(99.0));
}

TEST_CASE("forward_diffuse endpoints and mid value") {
    DiffusionSchedule s;
    s.T = 3;
    s.alpha = {0.9999, 0.5, 0.25};
    s.alpha_bar = {1.0 - 1e-9, 0.25, 1e-9};
    s.sigma = {0.0, 0.0, 0.0};

    const FeatureVector x0{2.0};
    const FeatureVector noise{4.0};
    // abar ~ 1: x0 comes back (numerically)
    CHECK(forward_diffuse(x0, 1, noise, s)[0] == doctest::Approx(2.0).epsilon(1e-4));
    // abar ~ 0: pure noise
    CHECK(forward_diffuse(x0, 3, noise, s)[0] == doctest::Approx(4.0).epsilon(1e-4));
    // abar = 0.25: 1 + 2*sqrt(3)
    CHECK(forward_diffuse(x0, 2, noise, s)[0] == doctest::Approx(1.0 + 2.0 * std::sqrt(3.0)).epsilon(1e-12));

    CHECK_THROWS_AS(forward_diffuse(x0, 0, noise, s), RangeError);
    CHECK_THROWS_AS(forward_diffuse(x0, 4, noise, s), RangeError);
}

TEST_CASE("noise-prediction identity recovers x0") {
    const DiffusionSchedule s = DiffusionSchedule::linear_beta(50, 0.002, 0.28);
    CounterRng rng(3, 9);
    for (int t : {1, 10, 25, 50}) {
        FeatureVector x0{1.3, -0.4};
        FeatureVector eps{rng.next_gaussian(), rng.next_gaussian()};
        const FeatureVector xt = forward_diffuse(x0, t, eps, s);
        const double abar = s.alpha_bar_at(t);
        const FeatureVector rec = (1.0 / std::sqrt(abar)) * axpy(xt, -std::sqrt(1.0 - abar), eps);
        CHECK(norm2(rec - x0) < 1e-12);
    }
}

TEST_CASE("reverse step: identity and pure rescale cases") {
    DiffusionSchedule s;
    s.T = 2;
    s.alpha = {1.0 - 1e-12, 0.81};
    s.alpha_bar = {1.0 - 1e-12, 0.81 * (1.0 - 1e-12)};
    s.sigma = {0.0, 0.0};
    const FeatureVector zero{0.0};

    // eps == 0, alpha ~ 1: unchanged
    const FeatureVector x{0.7};
    CHECK(reverse_step_from_epsilon(x, 1, zero, s, zero)[0] == doctest::Approx(0.7).epsilon(1e-9));

    // eps == 0, alpha = 0.81: x / sqrt(alpha)
    const FeatureVector y{0.9};
    CHECK(reverse_step_from_epsilon(y, 2, zero, s, zero)[0] == doctest::Approx(1.0).epsilon(1e-9));

    FeatureVector bad{std::nan("")};
    CHECK_THROWS_AS(reverse_step_from_epsilon(y, 2, bad, s, zero), NumericError);
}

TEST_CASE("default schedule satisfies its invariants") {
    const DiffusionSchedule s = DiffusionSchedule::linear_beta(50, 0.002, 0.28);
    s.validate();
    CHECK(s.alpha_bar.back() < 1e-3);
    // A slow ramp that leaves too much signal at T must be rejected.
    const DiffusionSchedule slow = DiffusionSchedule::linear_beta(50, 0.0001, 0.02);
    CHECK_THROWS_AS(slow.validate(), ConfigError);
}

TEST_CASE("true_feature_trajectory samples the exact solution") {
    LinearSystem decay = LinearSystem::diagonal({-0.5}, FeatureVector{1.0});
    LinearSource source(decay, 1.0);
    TimeGrid grid{3, 4, 1.0};
    const auto traj = source.true_feature_trajectory(grid);
    REQUIRE(traj.size() == 4);
    for (int k = 0; k < 4; ++k)
        CHECK(traj[static_cast<size_t>(k)][0] == doctest::Approx(std::exp(-0.5 * k)).epsilon(1e-12));

    LinearSystem zero = LinearSystem::diagonal({0.0}, FeatureVector{2.5});
    LinearSource zsource(zero, 1.0);
    for (const auto& f : zsource.true_feature_trajectory(grid))
        CHECK(f[0] == doctest::Approx(2.5));
}

namespace {

ToyDenoiser tiny_trained_model(uint64_t seed) {
    const DiffusionSchedule s = DiffusionSchedule::linear_beta(50, 0.002, 0.28);
    TrainConfig cfg;
    cfg.dataset_size = 512;
    cfg.holdout_size = 256;
    cfg.max_epochs = 3;
    cfg.mse_threshold = 0.0;  // never converges; we want the fixed budget
    cfg.seed = seed;
    return train_denoiser(s, cfg).model;
}

}  // namespace

TEST_CASE("denoiser training is deterministic and trajectories repeat bit for bit") {
    const ToyDenoiser m1 = tiny_trained_model(11);
    const ToyDenoiser m2 = tiny_trained_model(11);
    CHECK(m1.w1 == m2.w1);
    CHECK(m1.w3 == m2.w3);

    DenoiserSource s1(m1), s2(m1);
    TimeGrid grid{50, 50, 1.0};
    s1.reset(5);
    s2.reset(5);
    const auto t1 = s1.true_feature_trajectory(grid);
    const auto t2 = s2.true_feature_trajectory(grid);
    REQUIRE(t1.size() == t2.size());
    for (size_t i = 0; i < t1.size(); ++i)
        CHECK(t1[i] == t2[i]);  // bit-identical
}

TEST_CASE("denoiser weights round-trip through the versioned file") {
    const ToyDenoiser m = tiny_trained_model(3);
    const std::string path = (std::filesystem::temp_directory_path() / "foca_weights_test.txt").string();
    m.save(path);
    const ToyDenoiser r = ToyDenoiser::load(path);
    CHECK(r.dx == m.dx);
    CHECK(r.hidden == m.hidden);
    CHECK(r.temb_dim == m.temb_dim);
    CHECK(r.schedule.T == m.schedule.T);
    CHECK(r.w1 == m.w1);
    CHECK(r.b1 == m.b1);
    CHECK(r.w2 == m.w2);
    CHECK(r.b2 == m.b2);
    CHECK(r.w3 == m.w3);
    CHECK(r.b3 == m.b3);
    // A run from the reloaded model matches the original bit for bit.
    DenoiserSource a(m), b(r);
    a.reset(9);
    b.reset(9);
    for (int s = 0; s < 50; ++s) {
        const FeatureVector fa = a.compute_feature(s);
        const FeatureVector fb = b.compute_feature(s);
        CHECK(fa == fb);
        a.advance(s, fa);
        b.advance(s, fb);
    }
    std::filesystem::remove(path);

    CHECK_THROWS_AS(ToyDenoiser::load("/nonexistent/path.txt"), ConfigError);
}

TEST_CASE("committed reference weights satisfy the training gate") {
    const std::string path = std::string(FOCA_SOURCE_DIR) + "/data/denoiser_v1.txt";
    const ToyDenoiser model = ToyDenoiser::load(path);
    model.schedule.validate();
    CHECK(model.dx == 2);
    CHECK(model.hidden == 64);
    CHECK(model.schedule.T == 50);

    // Recompute the holdout MSE the trainer reports.
    const std::vector<FeatureVector> holdout = sample_dataset(2000, 1 + 0x4001);
    CounterRng hrng(1, 0x401D);
    double mse = 0.0;
    for (const auto& x0 : holdout) {
        const int t = 1 + static_cast<int>(hrng.next_u64() % 50);
        FeatureVector eps{hrng.next_gaussian(), hrng.next_gaussian()};
        const FeatureVector xt = forward_diffuse(x0, t, eps, model.schedule);
        const FeatureVector pred = model.epsilon(xt, t);
        for (int j = 0; j < 2; ++j)
            mse += (pred[j] - eps[j]) * (pred[j] - eps[j]);
    }
    mse /= 2000.0 * 2.0;
    CHECK(mse < 0.25);
}
