#include "foca/diffusion.hpp"

#include <cmath>
#include <string>

namespace foca {

DiffusionSchedule DiffusionSchedule::linear_beta(int T, double beta_start, double beta_end) {
    return linear_beta_wobble(T, beta_start, beta_end, 0.0, 0.0, 1.0);
}

DiffusionSchedule DiffusionSchedule::linear_beta_wobble(int T, double beta_start, double beta_end, double amp,
                                                        double freq, double decay) {
    if (T < 1)
        throw ConfigError("DiffusionSchedule: T must be >= 1");
    if (amp < 0.0 || amp >= 1.0)
        throw ConfigError("DiffusionSchedule: wobble amplitude must be in [0, 1)");
    DiffusionSchedule s;
    s.T = T;
    s.alpha.resize(static_cast<size_t>(T));
    s.alpha_bar.resize(static_cast<size_t>(T));
    s.sigma.assign(static_cast<size_t>(T), 0.0);
    double abar = 1.0;
    for (int t = 1; t <= T; ++t) {
        double beta = T == 1 ? beta_start : beta_start + (beta_end - beta_start) * (t - 1) / double(T - 1);
        if (amp > 0.0)
            beta *= 1.0 + amp * std::exp(-(t - 1) / decay) * std::sin(freq * t);
        const double a = 1.0 - beta;
        abar *= a;
        s.alpha[static_cast<size_t>(t - 1)] = a;
        s.alpha_bar[static_cast<size_t>(t - 1)] = abar;
    }
    return s;
}

double DiffusionSchedule::alpha_at(int t) const {
    if (t < 1 || t > T)
        throw RangeError("DiffusionSchedule: timestep " + std::to_string(t) + " not in [1, " + std::to_string(T) + "]");
    return alpha[static_cast<size_t>(t - 1)];
}

double DiffusionSchedule::alpha_bar_at(int t) const {
    if (t < 1 || t > T)
        throw RangeError("DiffusionSchedule: timestep " + std::to_string(t) + " not in [1, " + std::to_string(T) + "]");
    return alpha_bar[static_cast<size_t>(t - 1)];
}

double DiffusionSchedule::sigma_at(int t) const {
    if (t < 1 || t > T)
        throw RangeError("DiffusionSchedule: timestep " + std::to_string(t) + " not in [1, " + std::to_string(T) + "]");
    return sigma[static_cast<size_t>(t - 1)];
}

void DiffusionSchedule::validate() const {
    if (T < 1 || alpha.size() != static_cast<size_t>(T) || alpha_bar.size() != static_cast<size_t>(T))
        throw ConfigError("DiffusionSchedule: inconsistent sizes");
    double prev = 1.0;
    for (int t = 1; t <= T; ++t) {
        const double a = alpha[static_cast<size_t>(t - 1)];
        const double ab = alpha_bar[static_cast<size_t>(t - 1)];
        if (!(a > 0.0 && a < 1.0))
            throw ConfigError("DiffusionSchedule: alpha_" + std::to_string(t) + " not in (0,1)");
        if (!(ab < prev))
            throw ConfigError("DiffusionSchedule: alpha_bar not strictly decreasing at t=" + std::to_string(t));
        prev = ab;
    }
    if (!(alpha_bar.back() < 1e-3))
        throw ConfigError("DiffusionSchedule: alpha_bar_T = " + std::to_string(alpha_bar.back()) +
                          " too large; terminal state must be near-Gaussian (< 1e-3)");
}

FeatureVector forward_diffuse(const FeatureVector& x0, int t, const FeatureVector& noise,
                              const DiffusionSchedule& schedule) {
    check_same_dim(x0, noise, "forward_diffuse");
    const double abar = schedule.alpha_bar_at(t);
    FeatureVector out = std::sqrt(abar) * x0;
    out = axpy(out, std::sqrt(1.0 - abar), noise);
    ensure_finite(out, "forward_diffuse");
    return out;
}

FeatureVector reverse_step_from_epsilon(const FeatureVector& x_t, int t, const FeatureVector& epsilon_hat,
                                        const DiffusionSchedule& schedule, const FeatureVector& noise) {
    check_same_dim(x_t, epsilon_hat, "reverse_step");
    ensure_finite(epsilon_hat, "reverse_step: denoiser output");
    const double a = schedule.alpha_at(t);
    const double abar = schedule.alpha_bar_at(t);
    const double coef = (1.0 - a) / std::sqrt(1.0 - abar);
    FeatureVector out = axpy(x_t, -coef, epsilon_hat);
    out = (1.0 / std::sqrt(a)) * out;
    const double sig = schedule.sigma_at(t);
    if (sig != 0.0) {
        check_same_dim(x_t, noise, "reverse_step: noise");
        out = axpy(out, sig, noise);
    }
    ensure_finite(out, "reverse_step");
    return out;
}

}  // namespace foca
