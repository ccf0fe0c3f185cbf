#pragma once

#include <memory>
#include <string>
#include <vector>

#include "foca/denoiser.hpp"
#include "foca/feature.hpp"
#include "foca/linear_system.hpp"
#include "foca/time_grid.hpp"

namespace foca {

/// A generator of feature trajectories that supports cached execution.
///
/// One sampling step at index s consists of obtaining the step's feature
/// (computed on full steps, predicted on skipped ones) and then completing
/// the step: the one-step map is applied to whatever feature was used, so
/// prediction errors propagate through the same dynamics the real run uses.
class TrajectorySource {
  public:
    virtual ~TrajectorySource() = default;

    virtual std::string name() const = 0;
    virtual int feature_dim() const = 0;
    virtual double step_size() const = 0;
    virtual int default_total_steps() const = 0;

    virtual void reset(uint64_t seed) = 0;

    /// Full evaluation of the feature at the current state.
    virtual FeatureVector compute_feature(int step) = 0;

    /// Complete step s using the given (computed or predicted) feature.
    virtual void advance(int step, const FeatureVector& feature) = 0;

    virtual FeatureVector current_state() const = 0;

    /// Ground-truth feature trajectory: analytic sources sample their exact
    /// (or high-accuracy reference) solution; the denoiser runs uncached.
    virtual std::vector<FeatureVector> true_feature_trajectory(const TimeGrid& grid) const = 0;

    virtual std::unique_ptr<TrajectorySource> clone() const = 0;
};

/// dF/dt = A F executed with the explicit Euler map M(f) = f + h A f.
/// The feature is the state itself; a skipped step applies M to the
/// predicted feature, so the one-step error-propagation map is I + hA.
class LinearSource final : public TrajectorySource {
  public:
    LinearSource(LinearSystem system, double h) : system_(std::move(system)), h_(h), state_(system_.initial_state) {}

    std::string name() const override { return "linear"; }
    int feature_dim() const override { return system_.dim; }
    double step_size() const override { return h_; }
    int default_total_steps() const override { return 50; }

    void reset(uint64_t) override { state_ = system_.initial_state; }
    FeatureVector compute_feature(int) override { return state_; }
    void advance(int, const FeatureVector& feature) override { state_ = one_step_map(feature); }
    FeatureVector current_state() const override { return state_; }

    FeatureVector one_step_map(const FeatureVector& f) const { return axpy(f, h_, system_.rhs(f)); }
    const LinearSystem& system() const { return system_; }

    std::vector<FeatureVector> true_feature_trajectory(const TimeGrid& grid) const override {
        std::vector<FeatureVector> out;
        out.reserve(static_cast<size_t>(grid.num_steps));
        for (int k = 0; k < grid.num_steps; ++k)
            out.push_back(exact_solution(system_, grid.time(k)));
        return out;
    }

    std::unique_ptr<TrajectorySource> clone() const override { return std::make_unique<LinearSource>(*this); }

  private:
    LinearSystem system_;
    double h_;
    FeatureVector state_;
};

/// Van der Pol dynamics; completion is an RK4 substep applied to the feature.
class VanDerPolSource final : public TrajectorySource {
  public:
    VanDerPolSource(VanDerPol problem, double h, int substeps = 16)
        : problem_(std::move(problem)), h_(h), substeps_(substeps), state_(problem_.initial_state) {}

    std::string name() const override { return "vdp"; }
    int feature_dim() const override { return 2; }
    double step_size() const override { return h_; }
    int default_total_steps() const override { return 200; }

    void reset(uint64_t) override { state_ = problem_.initial_state; }
    FeatureVector compute_feature(int) override { return state_; }
    void advance(int, const FeatureVector& feature) override {
        auto rhs = [this](const FeatureVector& f) { return problem_.rhs(f); };
        state_ = rk4_reference(rhs, feature, h_, 1, substeps_).back();
    }
    FeatureVector current_state() const override { return state_; }

    std::vector<FeatureVector> true_feature_trajectory(const TimeGrid& grid) const override {
        auto rhs = [this](const FeatureVector& f) { return problem_.rhs(f); };
        auto traj = rk4_reference(rhs, problem_.initial_state, grid.h, grid.num_steps - 1, 1000);
        return traj;
    }

    std::unique_ptr<TrajectorySource> clone() const override { return std::make_unique<VanDerPolSource>(*this); }

  private:
    VanDerPol problem_;
    double h_;
    int substeps_;
    FeatureVector state_;
};

/// Reverse-diffusion sampling with the toy denoiser. The feature is the
/// first hidden activation; a skipped step feeds the substituted activation
/// through the remaining layers and the reverse update.
class DenoiserSource final : public TrajectorySource {
  public:
    explicit DenoiserSource(ToyDenoiser model) : model_(std::move(model)), state_(FeatureVector::zeros(model_.dx)) {
        grid_.start_timestep = model_.schedule.T;
        grid_.num_steps = model_.schedule.T;
        grid_.h = 1.0;
    }

    std::string name() const override { return "denoiser"; }
    int feature_dim() const override { return model_.hidden; }
    double step_size() const override { return grid_.h; }
    int default_total_steps() const override { return grid_.num_steps; }

    void reset(uint64_t seed) override {
        last_seed_ = seed;
        CounterRng rng(seed, /*stream=*/0x5EED);
        state_ = FeatureVector::zeros(model_.dx);
        for (int i = 0; i < model_.dx; ++i)
            state_[i] = rng.next_gaussian();
    }

    FeatureVector compute_feature(int step) override { return model_.hidden_features(state_, grid_.timestep(step)); }

    void advance(int step, const FeatureVector& feature) override {
        const FeatureVector eps = model_.epsilon_from_hidden(feature);
        state_ = reverse_step_from_epsilon(state_, grid_.timestep(step), eps, model_.schedule,
                                           FeatureVector::zeros(model_.dx));
    }

    FeatureVector current_state() const override { return state_; }

    std::vector<FeatureVector> true_feature_trajectory(const TimeGrid& grid) const override {
        DenoiserSource copy = *this;
        copy.reset(last_seed_);
        std::vector<FeatureVector> out;
        out.reserve(static_cast<size_t>(grid.num_steps));
        for (int s = 0; s < grid.num_steps; ++s) {
            const FeatureVector f = copy.compute_feature(s);
            out.push_back(f);
            copy.advance(s, f);
        }
        return out;
    }

    const ToyDenoiser& model() const { return model_; }
    const TimeGrid& grid() const { return grid_; }

    std::unique_ptr<TrajectorySource> clone() const override { return std::make_unique<DenoiserSource>(*this); }

  private:
    ToyDenoiser model_;
    TimeGrid grid_;
    FeatureVector state_;
    uint64_t last_seed_ = 1;
};

}  // namespace foca
