#pragma once

// Planar special functions: the complete elliptic integral K and the
// decreasing homeomorphism mu : (0,1) -> (0,inf) that gives the exact
// modulus of the planar canonical ring domains, plus its relatives for
// the two canonical families and its derivative and inverse.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ringmod/errors.hpp"

namespace ringmod {

namespace detail {

// (pi/2) / agm(1, g): equals K(w) when g = sqrt(1 - w). Callers pass the
// seed directly so that complements like 1 - r^2 never go through a lossy
// subtraction. Quadratic convergence, ~8 iterations for any sane seed.
inline double elliptic_k_from_seed(double g) {
    double a = 1.0;
    for (int i = 0; i < 64; ++i) {
        const double an = 0.5 * (a + g);
        const double gn = std::sqrt(a * g);
        a = an;
        g = gn;
        if (std::abs(a - g) <= 4.0 * std::numeric_limits<double>::epsilon() * a) break;
    }
    return std::numbers::pi / (2.0 * a);
}

} // namespace detail

// K(w) = int_0^1 dx / sqrt((1 - x^2)(1 - w x^2)), parameter convention:
// w multiplies x^2. Evaluated as (pi/2) / agm(1, sqrt(1 - w)).
inline double elliptic_k(double w) {
    if (!(w >= 0.0 && w < 1.0))
        throw domain_error("elliptic_k: parameter must lie in [0,1), got " + std::to_string(w));
    return detail::elliptic_k_from_seed(std::sqrt(1.0 - w));
}

// mu(r) = (pi/2) K(1 - r^2) / K(r^2) on (0,1): the modulus of the unit disc
// slit along [0, r]. Strictly decreasing, mu(1/sqrt 2) = pi/2. The seeds are
// r for the numerator and sqrt((1-r)(1+r)) for the denominator, both formed
// without cancellation.
inline double mu(double r) {
    if (!(r > 0.0 && r < 1.0))
        throw domain_error("mu: argument must lie in (0,1), got " + std::to_string(r));
    // Below 1e-8 the tail expansion log(4/r) is already accurate to ~1e-15.
    if (r < 1e-8) return std::log(4.0 / r);
    const double num = detail::elliptic_k_from_seed(r);
    const double den = detail::elliptic_k_from_seed(std::sqrt((1.0 - r) * (1.0 + r)));
    return std::numbers::pi / 2.0 * num / den;
}

// Modulus of the plane ring bounded by the unit ball and the ray [s,inf]
// on the axis: mu_g(s) = mu(1/s), s > 1.
inline double mu_g(double s) {
    if (!(s > 1.0))
        throw domain_error("mu_g: argument must be > 1, got " + std::to_string(s));
    return mu(1.0 / s);
}

// Modulus of the plane ring bounded by the segment [-e1, 0] and the ray
// [t e1, inf]: mu_t(t) = 2 mu(1/sqrt(t+1)) = pi K(t/(t+1)) / K(1/(t+1)).
// Computed from the K-ratio with seeds sqrt(u) and sqrt(t u), u = 1/(t+1);
// at t = 1 both seeds coincide and the ratio is 1 to the last bit.
inline double mu_t(double t) {
    if (!(t > 0.0))
        throw domain_error("mu_t: argument must be > 0, got " + std::to_string(t));
    const double u = 1.0 / (t + 1.0);
    const double num = detail::elliptic_k_from_seed(std::sqrt(u));        // K(t/(t+1))
    const double den = detail::elliptic_k_from_seed(std::sqrt(t * u));    // K(1/(t+1))
    return std::numbers::pi * num / den;
}

// d mu / d r = -pi^2 / (4 r (1 - r^2) K(r^2)^2).
inline double mu_prime(double r) {
    if (!(r > 0.0 && r < 1.0))
        throw domain_error("mu_prime: argument must lie in (0,1), got " + std::to_string(r));
    const double k = detail::elliptic_k_from_seed(std::sqrt((1.0 - r) * (1.0 + r)));
    const double pi = std::numbers::pi;
    return -pi * pi / (4.0 * r * (1.0 - r * r) * k * k);
}

// Inverse of mu: given m > 0 find r in (0,1) with mu(r) = m. Bisection on
// log r until the bracket is ~1e-12 wide, then one Newton step with
// mu_prime to polish. Note the representable range: the largest double
// below 1 already has mu ~ 0.127, so requests much under that return the
// closest representable r rather than hitting m.
inline double inverse_mu(double m) {
    if (!(m > 0.0) || !std::isfinite(m))
        throw domain_error("inverse_mu: argument must be positive and finite, got " +
                           std::to_string(m));
    // Seed bracket from the tail behaviour mu(r) ~ log(4/r) for small r and
    // mu -> 0 as r -> 1, then widen defensively until it actually straddles.
    double lo = std::max(std::exp(-m - 2.0), 1e-300);   // mu(lo) > m wanted
    double hi = 1.0 - 1e-16;                            // mu(hi) < m wanted
    while (mu(lo) <= m) {
        lo *= 0.125;
        if (lo < 1e-300) { lo = 1e-300; break; }
    }
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < 200 && (lhi - llo) > 1e-12; ++i) {
        const double lmid = 0.5 * (llo + lhi);
        if (mu(std::exp(lmid)) > m)
            llo = lmid;   // mu decreasing: still left of the root
        else
            lhi = lmid;
    }
    double r = std::exp(0.5 * (llo + lhi));
    const double corr = (mu(r) - m) / mu_prime(r);
    if (std::isfinite(corr)) {
        const double polished = r - corr;
        if (polished > 0.0 && polished < 1.0) r = polished;
    }
    return r;
}

} // namespace ringmod
