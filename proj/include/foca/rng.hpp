#pragma once

#include <cmath>
#include <cstdint>

namespace foca {

/// Counter-based deterministic generator.
///
/// Output i of stream (seed, stream) is splitmix64(key + i*GAMMA) with
/// key = splitmix64(seed ^ splitmix64(stream)) and GAMMA = 0x9E3779B97F4A7C15.
/// The sequence depends only on (seed, stream, i), never on platform state,
/// so runs are reproducible bit for bit across machines and languages.
class CounterRng {
  public:
    static constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    static uint64_t mix(uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    CounterRng(uint64_t seed, uint64_t stream = 0) : key_(mix(seed ^ mix(stream + kGamma))), counter_(0) {}

    uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; two uniforms per pair, second value cached.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        if (u1 <= 0.0)
            u1 = 0x1.0p-53;
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    uint64_t key_;
    uint64_t counter_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace foca
