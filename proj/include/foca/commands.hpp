#pragma once

#include <memory>
#include <string>

#include "foca/config.hpp"
#include "foca/sources.hpp"

namespace foca {

// Exit codes shared by the CLI and the command implementations.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitRuntimeError = 2;
inline constexpr int kExitPartialFailure = 3;

std::unique_ptr<TrajectorySource> make_source(const ExperimentConfig& config);

/// Builds the diagonal test system whose one-step map I + hA has spectral
/// radius rho (lambda = (rho - 1)/h on every axis).
LinearSystem linear_system_for_rho(double rho, int dim, double h);

int cmd_train(const ExperimentConfig& config, const std::string& out_dir);
int cmd_sweep(const ExperimentConfig& config, const std::string& out_dir);
int cmd_prop1(const ExperimentConfig& config, const std::string& out_dir);
int cmd_dump(const ExperimentConfig& config, const std::string& out_dir);

}  // namespace foca
