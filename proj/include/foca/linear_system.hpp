#pragma once

#include <functional>
#include <vector>

#include "foca/feature.hpp"

namespace foca {

/// dF/dt = A F with a known exact solution, used as a measurable ground truth.
struct LinearSystem {
    int dim = 1;
    std::vector<double> a;  // row-major dim x dim
    FeatureVector initial_state;

    static LinearSystem diagonal(const std::vector<double>& lambdas, FeatureVector x0);
    static LinearSystem rotation(double omega, FeatureVector x0);
    static LinearSystem two_scale(double lambda_fast, double lambda_slow, FeatureVector x0);

    FeatureVector rhs(const FeatureVector& f) const;

    /// Spectral radius of the one-step map I + hA.
    double contraction_rho(double h) const;

    bool is_diagonal() const;
};

/// exp(A t) F(0); diagonal systems entrywise, otherwise a squared Taylor
/// series for the matrix exponential (exact to roundoff at these sizes).
FeatureVector exact_solution(const LinearSystem& system, double t);

/// Van der Pol oscillator with stiffness parameter mu.
struct VanDerPol {
    double mu = 5.0;
    FeatureVector initial_state{2.0, 0.0};

    FeatureVector rhs(const FeatureVector& f) const;
};

/// Classical RK4 at step h/substeps, the reference for problems without a
/// closed form.
std::vector<FeatureVector> rk4_reference(const std::function<FeatureVector(const FeatureVector&)>& rhs,
                                         const FeatureVector& x0, double h, int steps, int substeps = 1000);

}  // namespace foca
