#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "foca/denoiser.hpp"
#include "foca/predictors.hpp"

namespace foca {

/// Validated experiment description. File values are key = value pairs under
/// [section] headers; --override section.key=value wins over file values.
struct ExperimentConfig {
    std::string experiment = "default";

    // [source]
    std::string source_kind = "denoiser";  // denoiser | linear | two_scale | rotation | vdp
    double source_rho = 0.5;               // linear: contraction of the one-step map
    int source_dim = 1;
    double source_lambda_fast = -100.0;
    double source_lambda_slow = -1.0;
    double source_omega = 1.0;
    double source_mu = 5.0;

    // [schedule]
    std::vector<int> intervals = {5};
    int total_steps = 50;
    int warmup_steps = 2;

    // [predictors]
    std::vector<PredictorKind> kinds = {PredictorKind::Reuse, PredictorKind::Taylor, PredictorKind::Bdf2Only,
                                        PredictorKind::FoCa};
    int taylor_order = 2;

    // [run]
    std::vector<uint64_t> seeds = {1};
    double h = 1.0;
    int threads = 1;
    int mmd_samples = 0;
    int stiffness_window = 5;

    // [denoiser]
    std::string weights_path = "data/denoiser_v1.txt";
    int T = 50;
    double beta_start = 0.0005;
    double beta_end = 0.28;
    double wobble_amp = 0.5;
    double wobble_freq = 1.3;
    double wobble_decay = 8.0;

    // [train]
    TrainConfig train;

    // [prop1]
    int prop1_max_k = 20;
    std::string prop1_kind = "foca";

    // [dump]
    std::string dump_kind = "foca";
    int dump_interval = 5;

    void validate() const;

    /// Canonical "key=value;..." line embedded in every output file.
    std::string normalized() const;

    static ExperimentConfig from_file(const std::string& path);
    void apply_override(const std::string& key_equals_value);
};

}  // namespace foca
