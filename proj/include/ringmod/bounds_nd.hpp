#pragma once

// Dimension-general constants and bounds for the canonical ring families:
// sphere measures, the distortion constant lambda_n, growth brackets for the
// canonical-ring size functions Phi_n / Psi_n and their capacity companions,
// the offset constant A_n = sup_t (mod of the two-slit ring minus log t),
// Q_n = 4 exp(A_n / 2), and an upper modulus integral for the symmetric
// two-segment ring. Everything planar is exact through the special
// functions; for n >= 3 the results are proven two-sided brackets.

#include <cmath>
#include <numbers>
#include <string>

#include "ringmod/bracket.hpp"
#include "ringmod/detail/quadrature.hpp"
#include "ringmod/errors.hpp"
#include "ringmod/special2d.hpp"

namespace ringmod {

// Surface measure of the unit sphere S^{n-1} in R^n: n pi^{n/2} / Gamma(n/2+1),
// evaluated through the integer-parity closed forms so the value is exact up
// to rounding: 2pi, 4pi, 2pi^2, ...
inline double omega(Dimension dim) {
    const int n = dim.value();
    const double pi = std::numbers::pi;
    if (n % 2 == 0) {
        const int k = n / 2;                       // omega = 2k pi^k / k!
        double v = 2.0 * k;
        for (int i = 1; i <= k; ++i) v *= pi / i;
        return v;
    }
    // n = 2k-1: omega = (2k-1) k! 2^{2k} pi^{k-1} / (2k)!
    const int k = (n + 1) / 2;
    double v = n * std::ldexp(1.0, 2 * k);         // (2k-1) 2^{2k}
    for (int i = 1; i < k; ++i) v *= pi;           // pi^{k-1}
    for (int i = k + 1; i <= 2 * k; ++i) v /= i;   // k!/(2k)!
    return v;
}

// The Grotzsch-type distortion constant lambda_n. Exactly 4 in the plane;
// for n >= 3 only the two-sided bound [4, 2^{n/(n-1)} e^{n(n-2)/(n-1)}]
// is available.
inline ModulusBracket lambda_bracket(Dimension dim) {
    const int n = dim.value();
    if (n == 2) return ModulusBracket::exact(4.0);
    const double hi = std::pow(2.0, double(n) / (n - 1)) *
                      std::exp(double(n) * (n - 2) / (n - 1));
    return ModulusBracket::analytic(4.0, hi);
}

// Size function of the ball-and-ray ring: Phi_n(s) = exp(mod), s > 1.
// Planar case exact via mu_g; otherwise s <= Phi_n(s) <= lambda_n s.
inline ModulusBracket phi_bracket(Dimension dim, double s) {
    if (!(s > 1.0))
        throw domain_error("phi_bracket: s must be > 1, got " + std::to_string(s));
    if (dim.planar()) return ModulusBracket::exact(std::exp(mu_g(s)));
    const double lam_hi = lambda_bracket(dim).hi;
    return ModulusBracket::analytic(s, lam_hi * s);
}

// Size function of the two-slit ring: Psi_n(t) = exp(mod), t > 0.
// Planar case exact via mu_t; otherwise
// t + 1 <= Psi_n(t) <= lambda_n^2 (sqrt(1+t) + sqrt t)^2 / 4.
inline ModulusBracket psi_bracket(Dimension dim, double t) {
    if (!(t > 0.0))
        throw domain_error("psi_bracket: t must be > 0, got " + std::to_string(t));
    if (dim.planar()) return ModulusBracket::exact(std::exp(mu_t(t)));
    const double lam_hi = lambda_bracket(dim).hi;
    const double s = std::sqrt(1.0 + t) + std::sqrt(t);
    return ModulusBracket::analytic(t + 1.0, lam_hi * lam_hi * s * s / 4.0);
}

enum class CapacityFamily { gamma, tau };

// Capacity of the canonical families: gamma_n(s) = omega / (log Phi_n(s))^{n-1}
// for the ball-and-ray ring (s > 1), tau_n(t) likewise through Psi_n (t > 0).
// Since log is increasing and x -> omega / x^{n-1} decreasing, the bracket
// endpoints swap.
inline ModulusBracket gamma_tau_bracket(Dimension dim, double arg, CapacityFamily which) {
    const ModulusBracket size = (which == CapacityFamily::gamma)
                                    ? phi_bracket(dim, arg)
                                    : psi_bracket(dim, arg);
    const double w = omega(dim);
    const double p = dim.value() - 1;
    return size.map_decreasing([&](double v) { return w / std::pow(std::log(v), p); });
}

// Generic upper bound for the offset constant: 2 log((1 + sqrt 2) lambda_hi / 2).
// Exposed separately because it is meaningful at every n, including n = 2
// where the exact value pi undercuts it (the formula gives ~3.14904 there).
inline double a_upper_bound_generic(Dimension dim) {
    const double lam_hi = lambda_bracket(dim).hi;
    return 2.0 * std::log((1.0 + std::numbers::sqrt2) * lam_hi / 2.0);
}

// The offset constant A_n = sup_{t>1} (mod of the two-slit ring - log t).
// Exactly pi in the plane. For n >= 3 the lower endpoint log 2 comes from
// the size bound Psi_n >= t + 1 as t -> 1, the upper from the generic
// formula above.
inline ModulusBracket a_constant(Dimension dim) {
    if (dim.planar()) return ModulusBracket::exact(std::numbers::pi);
    return ModulusBracket::analytic(std::log(2.0), a_upper_bound_generic(dim));
}

// Q_n = 4 exp(A_n / 2); feeds the semiring diameter bound.
inline ModulusBracket q_constant(Dimension dim) {
    return a_constant(dim).map_increasing([](double a) { return 4.0 * std::exp(0.5 * a); });
}

// Upper bound for the modulus of the ring complementary to two symmetric
// segments [-e1/a, e1/a]-style in opposite position:
//   int_1^b ((r^2+1)/(r^2-1))^{(n-2)/(n-1)} dr / r,  b = a + sqrt(a^2 + 1).
// The integrand blows up like (r-1)^{-(n-2)/(n-1)} at the lower endpoint;
// substituting r = 1 + u^{n-1} absorbs that power exactly, and the far piece
// runs in log coordinates. At n = 2 the integrand is 1/r and the value is
// log b on the nose.
inline double re_modulus_upper(Dimension dim, double a, double tol = 1e-10) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw domain_error("re_modulus_upper: a must be positive and finite, got " +
                           std::to_string(a));
    const int n = dim.value();
    const double beta = double(n - 2) / (n - 1);
    const double b = a + std::sqrt(a * a + 1.0);
    const double split = std::min(2.0, b);

    // After r = 1 + u^{n-1}: integrand dr = (n-1)/r * ((r^2+1)/(u^{n-1}+2))^beta du,
    // smooth on [0, u_top].
    const double u_top = std::pow(split - 1.0, 1.0 / (n - 1));
    const double near = detail::integrate(
        [&](double u) {
            double t1 = 1.0;
            for (int i = 0; i < n - 1; ++i) t1 *= u;   // u^{n-1} = r - 1
            const double r = 1.0 + t1;
            return (n - 1) / r * std::pow((r * r + 1.0) / (t1 + 2.0), beta);
        },
        0.0, u_top, 0.5 * tol);

    double far = 0.0;
    if (b > split) {
        // r = e^v turns dr/r into dv; the integrand decays to 1 quickly.
        far = detail::integrate(
            [&](double v) {
                const double r2 = std::exp(2.0 * v);
                return std::pow((r2 + 1.0) / (r2 - 1.0), beta);
            },
            std::log(split), std::log(b), 0.5 * tol);
    }
    return near + far;
}

// Estimate of log lambda_n obtained by chasing the limit
// log lambda_n = lim_{a->inf} (mod - log(a/2)) through the upper modulus
// integral at a finite cutoff. Numeric, not a proven bound for n >= 3;
// at n = 2 it converges to log 4.
inline double lambda_estimate(Dimension dim, double a_max) {
    if (!(a_max > 1.0))
        throw domain_error("lambda_estimate: cutoff must be > 1, got " + std::to_string(a_max));
    return re_modulus_upper(dim, a_max) - std::log(a_max / 2.0);
}

} // namespace ringmod
