#pragma once

// Test-side oracles: central finite differences, brute-force
// enumeration and random parameter draws. Nothing here calls the
// library's derivative code.

#include "debm/configspace.hpp"
#include "debm/estimators.hpp"
#include "debm/models.hpp"
#include "debm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace oracle {

using debm::Matrix;
using debm::Vector;

inline Vector fd_grad(const std::function<double(const Vector&)>& f, const Vector& theta,
                      double step = 1e-5) {
    Vector g(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        Vector hi = theta, lo = theta;
        hi[i] += step;
        lo[i] -= step;
        g[i] = (f(hi) - f(lo)) / (2.0 * step);
    }
    return g;
}

inline Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& theta,
                          double step = 1e-5) {
    const Eigen::Index n = theta.size();
    Matrix j(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector hi = theta, lo = theta;
        hi[i] += step;
        lo[i] -= step;
        j.col(i) = (f(hi) - f(lo)) / (2.0 * step);
    }
    return j;
}

// max |a - b| relative to max(max |b|, 1).
inline double rel_err(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

inline double rel_frobenius(const Matrix& a, const Matrix& b) {
    return (a - b).norm() / std::max(b.norm(), 1e-300);
}

inline Vector normal_vector(debm::Rng& rng, int n, double scale = 1.0) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = scale * rng.normal();
    return v;
}

// P(x) by direct exponentiation of -E over the whole space.
inline Vector brute_probabilities(const debm::EnergyModel& model, const Vector& theta) {
    const auto space = debm::enumerate_space(model.dimension());
    Vector p(static_cast<Eigen::Index>(space.size()));
    for (std::size_t i = 0; i < space.size(); ++i) p[i] = std::exp(-model.energy(theta, space[i]));
    return p / p.sum();
}

// P(x_d | x_-d) from brute-force probabilities.
inline double brute_conditional(const Vector& p, const debm::Configuration& x, int d) {
    const auto other = debm::flip(x, d);
    return p[x.index()] / (p[x.index()] + p[other.index()]);
}

} // namespace oracle
