#pragma once

#include <stdexcept>
#include <string>

namespace foca {

/// Invalid configuration or argument values detected before any computation.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Index or parameter outside its documented range.
struct RangeError : std::runtime_error {
    explicit RangeError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A predictor was asked for more history than the cache holds.
struct HistoryError : std::runtime_error {
    explicit HistoryError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite values or other numeric failures at run time.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A diagnostic was requested at a point with too few neighbors.
struct BoundaryError : std::runtime_error {
    explicit BoundaryError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace foca
