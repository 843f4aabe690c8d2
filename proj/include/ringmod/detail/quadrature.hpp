#pragma once

// Adaptive Gauss-Kronrod (G7/K15) quadrature. Self-contained, recursive
// bisection with the usual QUADPACK-style error estimate per panel.

#include <array>
#include <cmath>

#include "ringmod/errors.hpp"

namespace ringmod::detail {

// K15 nodes on [0,1] half-axis (symmetric) and weights; G7 shares the
// even-index nodes.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.0,
    0.2077849550078985,
    0.4058451513773972,
    0.5860872354676911,
    0.7415311855993944,
    0.8648644233597691,
    0.9491079123427585,
    0.9914553711208126,
};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.2094821410847278,
    0.2044329400752989,
    0.1903505780647854,
    0.1690047266392679,
    0.1406532597155259,
    0.1047900103222502,
    0.0630920926299785,
    0.0229353220105292,
};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.4179591836734694,  // node 0.0
    0.3818300505051189,  // node 0.4058...
    0.2797053914892767,  // node 0.7415...
    0.1294849661688697,  // node 0.9491...
};

template <class F>
struct GkPanel {
    double integral;
    double error;
};

template <class F>
GkPanel<F> gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double x = kKronrodNodes[i] * h;
        const double fv = (i == 0) ? f(c) : f(c - x) + f(c + x);
        k += kKronrodWeights[i] * fv;
        if (i % 2 == 0) g += kGaussWeights[i / 2] * fv;
    }
    k *= h;
    g *= h;
    const double diff = std::abs(k - g);
    // Standard sharpened estimate; falls back to the raw difference when tiny.
    const double err = diff > 0 ? std::min(diff, std::pow(200.0 * diff, 1.5)) : 0.0;
    return {k, err};
}

template <class F>
double gk_adaptive_rec(const F& f, double a, double b, double tol, int depth) {
    const auto p = gk15(f, a, b);
    if (p.error <= tol || depth <= 0) {
        if (depth <= 0 && p.error > 1e3 * tol)
            throw convergence_error("quadrature: panel refinement exhausted", 0, p.error);
        return p.integral;
    }
    const double c = 0.5 * (a + b);
    return gk_adaptive_rec(f, a, c, 0.5 * tol, depth - 1) +
           gk_adaptive_rec(f, c, b, 0.5 * tol, depth - 1);
}

// Integrate f over [a,b] to absolute tolerance tol.
template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-10) {
    if (a == b) return 0.0;
    return gk_adaptive_rec(f, a, b, tol, 48);
}

} // namespace ringmod::detail
