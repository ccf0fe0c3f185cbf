#include "foca/linear_system.hpp"

#include <cmath>
#include <complex>

namespace foca {

LinearSystem LinearSystem::diagonal(const std::vector<double>& lambdas, FeatureVector x0) {
    LinearSystem s;
    s.dim = static_cast<int>(lambdas.size());
    if (s.dim != x0.dim())
        throw ConfigError("LinearSystem::diagonal: lambda count must match initial state dim");
    s.a.assign(static_cast<size_t>(s.dim) * s.dim, 0.0);
    for (int i = 0; i < s.dim; ++i)
        s.a[static_cast<size_t>(i) * s.dim + i] = lambdas[static_cast<size_t>(i)];
    s.initial_state = std::move(x0);
    return s;
}

LinearSystem LinearSystem::rotation(double omega, FeatureVector x0) {
    if (x0.dim() != 2)
        throw ConfigError("LinearSystem::rotation: needs a 2-d initial state");
    LinearSystem s;
    s.dim = 2;
    s.a = {0.0, omega, -omega, 0.0};
    s.initial_state = std::move(x0);
    return s;
}

LinearSystem LinearSystem::two_scale(double lambda_fast, double lambda_slow, FeatureVector x0) {
    return diagonal({lambda_fast, lambda_slow}, std::move(x0));
}

FeatureVector LinearSystem::rhs(const FeatureVector& f) const {
    if (f.dim() != dim)
        throw RangeError("LinearSystem::rhs: dimension mismatch");
    FeatureVector out = FeatureVector::zeros(dim);
    for (int i = 0; i < dim; ++i) {
        double s = 0.0;
        for (int j = 0; j < dim; ++j)
            s += a[static_cast<size_t>(i) * dim + j] * f[j];
        out[i] = s;
    }
    return out;
}

bool LinearSystem::is_diagonal() const {
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            if (i != j && a[static_cast<size_t>(i) * dim + j] != 0.0)
                return false;
    return true;
}

double LinearSystem::contraction_rho(double h) const {
    // M = I + hA
    if (is_diagonal()) {
        double r = 0.0;
        for (int i = 0; i < dim; ++i)
            r = std::max(r, std::abs(1.0 + h * a[static_cast<size_t>(i) * dim + i]));
        return r;
    }
    if (dim == 2) {
        const double m00 = 1.0 + h * a[0], m01 = h * a[1];
        const double m10 = h * a[2], m11 = 1.0 + h * a[3];
        const double tr = m00 + m11, det = m00 * m11 - m01 * m10;
        const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4.0 * det, 0.0));
        const std::complex<double> l1 = 0.5 * (tr + disc), l2 = 0.5 * (tr - disc);
        return std::max(std::abs(l1), std::abs(l2));
    }
    // Power-ish estimate via repeated squaring of the Frobenius norm.
    std::vector<double> m(static_cast<size_t>(dim) * dim, 0.0);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            m[static_cast<size_t>(i) * dim + j] = (i == j ? 1.0 : 0.0) + h * a[static_cast<size_t>(i) * dim + j];
    const int squarings = 7;  // M^128
    std::vector<double> p = m;
    for (int s = 0; s < squarings; ++s) {
        std::vector<double> q(static_cast<size_t>(dim) * dim, 0.0);
        for (int i = 0; i < dim; ++i)
            for (int k = 0; k < dim; ++k) {
                const double pik = p[static_cast<size_t>(i) * dim + k];
                for (int j = 0; j < dim; ++j)
                    q[static_cast<size_t>(i) * dim + j] += pik * p[static_cast<size_t>(k) * dim + j];
            }
        p = std::move(q);
    }
    double fro = 0.0;
    for (double v : p)
        fro += v * v;
    return std::pow(std::sqrt(fro), 1.0 / 128.0);
}

namespace {

// exp(M) by scaling and squaring with a Taylor series; fine at dim <= ~8.
std::vector<double> expm(const std::vector<double>& m, int dim) {
    double maxabs = 0.0;
    for (double v : m)
        maxabs = std::max(maxabs, std::abs(v));
    int s = 0;
    double scale = 1.0;
    while (maxabs * scale > 0.5) {
        scale *= 0.5;
        ++s;
    }
    std::vector<double> ms(m.size());
    for (size_t i = 0; i < m.size(); ++i)
        ms[i] = m[i] * scale;

    std::vector<double> result(static_cast<size_t>(dim) * dim, 0.0);
    for (int i = 0; i < dim; ++i)
        result[static_cast<size_t>(i) * dim + i] = 1.0;
    std::vector<double> term = result;
    for (int k = 1; k <= 24; ++k) {
        std::vector<double> next(static_cast<size_t>(dim) * dim, 0.0);
        for (int i = 0; i < dim; ++i)
            for (int kk = 0; kk < dim; ++kk) {
                const double tik = term[static_cast<size_t>(i) * dim + kk] / k;
                for (int j = 0; j < dim; ++j)
                    next[static_cast<size_t>(i) * dim + j] += tik * ms[static_cast<size_t>(kk) * dim + j];
            }
        term = std::move(next);
        for (size_t i = 0; i < result.size(); ++i)
            result[i] += term[i];
    }
    for (int q = 0; q < s; ++q) {
        std::vector<double> sq(static_cast<size_t>(dim) * dim, 0.0);
        for (int i = 0; i < dim; ++i)
            for (int kk = 0; kk < dim; ++kk) {
                const double rik = result[static_cast<size_t>(i) * dim + kk];
                for (int j = 0; j < dim; ++j)
                    sq[static_cast<size_t>(i) * dim + j] += rik * result[static_cast<size_t>(kk) * dim + j];
            }
        result = std::move(sq);
    }
    return result;
}

}  // namespace

FeatureVector exact_solution(const LinearSystem& system, double t) {
    if (t < 0.0)
        throw RangeError("exact_solution: t must be >= 0");
    FeatureVector out = FeatureVector::zeros(system.dim);
    if (system.is_diagonal()) {
        for (int i = 0; i < system.dim; ++i)
            out[i] = system.initial_state[i] * std::exp(system.a[static_cast<size_t>(i) * system.dim + i] * t);
    } else {
        std::vector<double> at(system.a.size());
        for (size_t i = 0; i < at.size(); ++i)
            at[i] = system.a[i] * t;
        const std::vector<double> e = expm(at, system.dim);
        for (int i = 0; i < system.dim; ++i) {
            double s = 0.0;
            for (int j = 0; j < system.dim; ++j)
                s += e[static_cast<size_t>(i) * system.dim + j] * system.initial_state[j];
            out[i] = s;
        }
    }
    if (!out.all_finite())
        throw NumericError("exact_solution: overflow, |lambda * t| too large");
    return out;
}

FeatureVector VanDerPol::rhs(const FeatureVector& f) const {
    if (f.dim() != 2)
        throw RangeError("VanDerPol::rhs: needs a 2-d state");
    FeatureVector out = FeatureVector::zeros(2);
    out[0] = f[1];
    out[1] = mu * (1.0 - f[0] * f[0]) * f[1] - f[0];
    return out;
}

std::vector<FeatureVector> rk4_reference(const std::function<FeatureVector(const FeatureVector&)>& rhs,
                                         const FeatureVector& x0, double h, int steps, int substeps) {
    std::vector<FeatureVector> out;
    out.reserve(static_cast<size_t>(steps) + 1);
    FeatureVector x = x0;
    out.push_back(x);
    const double dt = h / substeps;
    for (int s = 0; s < steps; ++s) {
        for (int q = 0; q < substeps; ++q) {
            const FeatureVector k1 = rhs(x);
            const FeatureVector k2 = rhs(axpy(x, 0.5 * dt, k1));
            const FeatureVector k3 = rhs(axpy(x, 0.5 * dt, k2));
            const FeatureVector k4 = rhs(axpy(x, dt, k3));
            FeatureVector incr = k1 + k4;
            incr = axpy(incr, 2.0, k2);
            incr = axpy(incr, 2.0, k3);
            x = axpy(x, dt / 6.0, incr);
        }
        ensure_finite(x, "rk4_reference");
        out.push_back(x);
    }
    return out;
}

}  // namespace foca
