#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "ringmod/errors.hpp"
#include "ringmod/moebius.hpp"

namespace ringmod {

// ---------------------------------------------------------------------------
// Built-in distortion test maps. Two families are enough to exercise every
// consumer: Moebius transformations (distortion free) and the radial stretch
// x -> x |x|^(K-1), whose planar linear dilatation is exactly K. The grid
// diagnostics push boundary clouds through these maps and the empirical
// Holder verifier samples point pairs under them.
// ---------------------------------------------------------------------------
class TestMap {
public:
    // Identity; behaves as a Moebius map with no generators.
    TestMap() = default;

    static TestMap moebius(MoebiusMap m) {
        TestMap t;
        t.moebius_ = std::move(m);
        return t;
    }

    // x -> x |x|^(K-1) with K > 0; fixes the origin and every sphere
    // direction, so the closed unit ball maps onto itself.
    static TestMap radial_stretch(double exponent) {
        if (!(exponent > 0.0) || !std::isfinite(exponent))
            throw domain_error("TestMap::radial_stretch: exponent must be positive, got " +
                               std::to_string(exponent));
        TestMap t;
        t.stretch_ = true;
        t.exponent_ = exponent;
        return t;
    }

    bool is_conformal() const { return !stretch_; }

    // Planar linear dilatation: 1 for Moebius maps, max(K, 1/K) for the
    // stretch. The verifiers that consume this run in the plane.
    double dilatation() const {
        return stretch_ ? std::max(exponent_, 1.0 / exponent_) : 1.0;
    }

    Vec operator()(const Vec& x) const {
        if (stretch_) {
            const double r = detail::norm(x);
            if (r == 0.0) return x;
            return detail::scaled(x, std::pow(r, exponent_ - 1.0));
        }
        return moebius_.is_identity() ? x : moebius_(x);
    }

private:
    MoebiusMap moebius_;
    bool stretch_ = false;
    double exponent_ = 1.0;
};

// Hyperbolic translation of the unit ball along the axis through the unit
// vector xi: conjugate the half-space dilation y -> lambda y by the
// ball-to-half-space map sending xi to infinity. lambda = 1 gives the
// identity; lambda != 1 slides points along the xi axis while keeping the
// ball invariant.
inline MoebiusMap ball_automorphism(const Vec& xi, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw domain_error("ball_automorphism: lambda must be positive, got " +
                           std::to_string(lambda));
    const MoebiusMap up = moebius_to_halfspace(xi);
    return up.then(MoebiusMap::affine(lambda, Vec(xi.size(), 0.0))).then(up.inverse());
}

} // namespace ringmod
