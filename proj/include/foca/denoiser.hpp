#pragma once

#include <string>
#include <vector>

#include "foca/diffusion.hpp"
#include "foca/feature.hpp"
#include "foca/rng.hpp"

namespace foca {

/// Two-hidden-layer tanh MLP predicting the noise from (x_t, t). The cached
/// layer is the first hidden activation (width `hidden`).
struct ToyDenoiser {
    int dx = 2;
    int hidden = 64;
    int temb_dim = 16;
    DiffusionSchedule schedule;

    // Row-major weights: w1 [hidden x (dx+temb)], w2 [hidden x hidden], w3 [dx x hidden].
    std::vector<double> w1, b1, w2, b2, w3, b3;

    void init_weights(CounterRng& rng);

    static std::vector<double> time_embedding(int t, int dim);

    /// First hidden activation, tanh(W1 [x, temb(t)] + b1).
    FeatureVector hidden_features(const FeatureVector& x, int t) const;

    /// Remaining layers applied to a (possibly substituted) hidden activation.
    FeatureVector epsilon_from_hidden(const FeatureVector& h1) const;

    FeatureVector epsilon(const FeatureVector& x, int t) const;

    void save(const std::string& path) const;
    static ToyDenoiser load(const std::string& path);
};

/// Two-component Gaussian mixture, means (+-2, 0), std 0.3.
FeatureVector sample_mixture(CounterRng& rng);
std::vector<FeatureVector> sample_dataset(int n, uint64_t seed);

struct TrainConfig {
    int dataset_size = 10000;
    int holdout_size = 2000;
    int batch_size = 128;
    int max_epochs = 400;
    double learning_rate = 0.05;
    double mse_threshold = 0.25;
    uint64_t seed = 1;
};

struct TrainResult {
    ToyDenoiser model;
    std::vector<std::pair<int, double>> loss_trace;  // (epoch, holdout mse)
    double final_mse = 0.0;
    bool converged = false;
};

/// Plain SGD on the noise-prediction objective; holdout MSE per element.
TrainResult train_denoiser(const DiffusionSchedule& schedule, const TrainConfig& config);

}  // namespace foca
