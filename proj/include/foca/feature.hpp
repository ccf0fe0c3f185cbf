#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "foca/errors.hpp"

namespace foca {

/// Flat numeric state: one layer activation (or ODE state) at one timestep.
class FeatureVector {
  public:
    FeatureVector() = default;
    explicit FeatureVector(std::vector<double> values) : values_(std::move(values)) {}
    FeatureVector(std::initializer_list<double> values) : values_(values) {}

    static FeatureVector zeros(int dim) { return FeatureVector(std::vector<double>(static_cast<size_t>(dim), 0.0)); }

    int dim() const { return static_cast<int>(values_.size()); }
    double& operator[](int i) { return values_[static_cast<size_t>(i)]; }
    double operator[](int i) const { return values_[static_cast<size_t>(i)]; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    bool all_finite() const {
        for (double v : values_) {
            if (!std::isfinite(v))
                return false;
        }
        return true;
    }

    bool operator==(const FeatureVector& other) const { return values_ == other.values_; }

  private:
    std::vector<double> values_;
};

inline void check_same_dim(const FeatureVector& a, const FeatureVector& b, const char* where) {
    if (a.dim() != b.dim())
        throw RangeError(std::string(where) + ": dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()) + ")");
}

inline FeatureVector operator+(const FeatureVector& a, const FeatureVector& b) {
    check_same_dim(a, b, "operator+");
    FeatureVector out = a;
    for (int i = 0; i < out.dim(); ++i)
        out[i] += b[i];
    return out;
}

inline FeatureVector operator-(const FeatureVector& a, const FeatureVector& b) {
    check_same_dim(a, b, "operator-");
    FeatureVector out = a;
    for (int i = 0; i < out.dim(); ++i)
        out[i] -= b[i];
    return out;
}

inline FeatureVector operator*(double s, const FeatureVector& a) {
    FeatureVector out = a;
    for (int i = 0; i < out.dim(); ++i)
        out[i] *= s;
    return out;
}

/// a + s*b in one pass.
inline FeatureVector axpy(const FeatureVector& a, double s, const FeatureVector& b) {
    check_same_dim(a, b, "axpy");
    FeatureVector out = a;
    for (int i = 0; i < out.dim(); ++i)
        out[i] += s * b[i];
    return out;
}

inline double norm2(const FeatureVector& a) {
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        s += a[i] * a[i];
    return std::sqrt(s);
}

inline void ensure_finite(const FeatureVector& a, const char* where) {
    if (!a.all_finite())
        throw NumericError(std::string(where) + ": non-finite feature value");
}

}  // namespace foca
