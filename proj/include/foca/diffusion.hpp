#pragma once

#include <vector>

#include "foca/feature.hpp"

namespace foca {

/// Noise schedule over timesteps t = 1..T. alpha_bar[t-1] is the cumulative
/// product of alpha up to t; sigma is 0 everywhere for deterministic runs.
struct DiffusionSchedule {
    int T = 0;
    std::vector<double> alpha;
    std::vector<double> alpha_bar;
    std::vector<double> sigma;

    /// Linear beta ramp; alpha_t = 1 - beta_t, sigma = 0.
    static DiffusionSchedule linear_beta(int T, double beta_start, double beta_end);

    /// Linear ramp with a per-step wobble concentrated near t = 0:
    /// beta_t = ramp_t * (1 + amp * exp(-(t-1)/decay) * sin(freq * t)).
    /// The wobble puts fast dynamics into the low-noise tail, the region
    /// where sampling is numerically hardest.
    static DiffusionSchedule linear_beta_wobble(int T, double beta_start, double beta_end, double amp, double freq,
                                                double decay);

    double alpha_at(int t) const;
    double alpha_bar_at(int t) const;
    double sigma_at(int t) const;

    /// alpha in (0,1), alpha_bar strictly decreasing, alpha_bar_T < 1e-3.
    void validate() const;
};

/// x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps.
FeatureVector forward_diffuse(const FeatureVector& x0, int t, const FeatureVector& noise,
                              const DiffusionSchedule& schedule);

/// x_{t-1} = (x_t - ((1-alpha_t)/sqrt(1-abar_t)) eps_hat) / sqrt(alpha_t) + sigma_t * noise.
FeatureVector reverse_step_from_epsilon(const FeatureVector& x_t, int t, const FeatureVector& epsilon_hat,
                                        const DiffusionSchedule& schedule, const FeatureVector& noise);

}  // namespace foca
