#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ringmod/bounds_nd.hpp"
#include "ringmod/bracket.hpp"
#include "ringmod/errors.hpp"
#include "ringmod/geometry.hpp"
#include "ringmod/special2d.hpp"

namespace ringmod {

// ---------------------------------------------------------------------------
// Annulus extraction. A ring whose modulus exceeds the dimensional constant
// a_constant(n) contains, around any marked point of its bounded side, a
// round annulus carrying all but that constant of the modulus. The
// certificate records both moduli and the bracket endpoint actually used, so
// a consumer can audit the guarantee without re-deriving it.
// ---------------------------------------------------------------------------
struct SeparationCertificate {
    Annulus annulus;
    double guaranteed_modulus = 0.0;  // certified lower bound for the annulus
    double input_modulus = 0.0;       // caller's lower bound for the ring
    ModulusBracket constant_used;     // what was subtracted (upper end)
};

// Exact modulus of a planar canonical ring, the trusted way to fill the
// mod_lower argument of teichmuller_annulus at n = 2.
inline double canonical_ring_modulus_2d(CanonicalRing kind, double parameter) {
    return kind == CanonicalRing::grotzsch ? mu_g(parameter) : mu_t(parameter);
}

// Extracts the guaranteed round annulus around x0 from a ring with
// C0 bounded, infinity in C1, and modulus at least mod_lower. The inner
// radius is the exact circumradius of C0 about x0; the outer radius follows
// from the guarantee. The claimed mod_lower is the caller's responsibility
// for general geometry, but a cheap necessary condition is checked: C1 must
// stay outside the outer sphere, otherwise the claim was false.
inline SeparationCertificate teichmuller_annulus(const RingGeometry& ring, const Vec& x0,
                                                 double mod_lower) {
    const Dimension dim = ring.dim();
    if (x0.size() != static_cast<std::size_t>(dim.value()) || !detail::all_finite(x0))
        throw domain_error("teichmuller_annulus: x0 must be a finite point of the ambient space");
    if (!ring.c1().contains_infinity())
        throw domain_error("teichmuller_annulus: the unbounded side must be C1");
    const double scale = std::max(1.0, ring.c0().extent());
    if (ring.c0().distance(x0) > 1e-9 * scale)
        throw domain_error("teichmuller_annulus: x0 does not lie on C0 (distance " +
                           std::to_string(ring.c0().distance(x0)) + ")");
    const ModulusBracket a = a_constant(dim);
    if (!(mod_lower > a.hi))
        throw insufficient_modulus_error(
            "teichmuller_annulus: need mod_lower > " + std::to_string(a.hi) +
            ", got " + std::to_string(mod_lower));

    const double rho0 = ring.c0().max_distance(x0);
    if (!(rho0 > 0.0))
        throw domain_error("teichmuller_annulus: C0 degenerates to the single point x0");
    const double guaranteed = mod_lower - a.hi;
    const double rho1 = rho0 * std::exp(guaranteed);

    // Necessary consequence of the claim: the far component cannot intrude
    // into the certified annulus. Catching a violation here turns a silent
    // bad certificate into a loud input error.
    const double gap = ring.c1().distance(x0);
    if (gap < rho1 * (1.0 - 1e-12))
        throw domain_error("teichmuller_annulus: C1 comes within " + std::to_string(gap) +
                           " of x0 but the claimed modulus pushes the annulus out to " +
                           std::to_string(rho1) + "; mod_lower is not a valid lower bound");

    return SeparationCertificate{Annulus(x0, rho0, rho1), guaranteed, mod_lower, a};
}

// ---------------------------------------------------------------------------
// Separation under inversion. Inverting an annulus A(a; r0, r1) in the unit
// sphere at the origin yields a ring that still contains a round annulus,
// losing at most log 3 of modulus. The two cases depend on which side of A
// the origin sits; each produces closed-form radii.
// ---------------------------------------------------------------------------
enum class InversionCase { origin_in_c1, origin_in_c0 };

inline Annulus inversion_separation(const Annulus& a, InversionCase which) {
    const double m = annulus_modulus(a);
    if (!(m > std::log(3.0)))
        throw insufficient_modulus_error(
            "inversion_separation: need mod > log 3, got " + std::to_string(m));
    const double na = detail::norm(a.center);
    if (which == InversionCase::origin_in_c1) {
        if (!(na >= a.r1))
            throw domain_error("inversion_separation: origin_in_c1 needs |a| >= r1, got |a| = " +
                               std::to_string(na) + ", r1 = " + std::to_string(a.r1));
        const double big_r0 = a.r0 / (na * (na - a.r0));
        const double big_r1 = a.r1 / (na * (na + a.r1));
        Vec inverted = detail::scaled(a.center, 1.0 / (na * na));
        return Annulus(std::move(inverted), big_r0, big_r1);
    }
    if (!(na <= a.r0))
        throw domain_error("inversion_separation: origin_in_c0 needs |a| <= r0, got |a| = " +
                           std::to_string(na) + ", r0 = " + std::to_string(a.r0));
    return Annulus(Vec(a.center.size(), 0.0), 1.0 / (a.r1 - na), 1.0 / (a.r0 + na));
}

// ---------------------------------------------------------------------------
// Diameter versus distance. A bounded component enclosed by a fat ring is
// small compared to its distance from the far component; the ratio decays
// like e^{-mod}. B is the calibration threshold the caller commits to, and
// the constant uses the upper end of a_constant so the bound never
// overclaims.
// ---------------------------------------------------------------------------
inline double diam_dist_bound(Dimension dim, double mod_lower, double b_threshold) {
    const ModulusBracket a = a_constant(dim);
    if (!(b_threshold > a.hi))
        throw domain_error("diam_dist_bound: need B > " + std::to_string(a.hi) +
                           ", got " + std::to_string(b_threshold));
    if (!(mod_lower >= b_threshold))
        throw domain_error("diam_dist_bound: need mod_lower >= B, got mod_lower = " +
                           std::to_string(mod_lower) + ", B = " + std::to_string(b_threshold));
    const double big_m = 2.0 / (std::exp(-a.hi) - std::exp(-b_threshold));
    return big_m * std::exp(-mod_lower);
}

// ---------------------------------------------------------------------------
// Uniform perfectness at finite resolution. The defining condition asks that
// every shell {c r < |x - a| < r} around every point meet the set. A finite
// sample can only testify about radii between its own resolution and its
// extent, so the analyzer grids r dyadically from the minimum gap up to the
// finite diameter, and around each point tests only radii above that point's
// nearest-neighbour distance. A point with no tested radius at all is
// isolated at every scale the data can see, which is a failure witness; the
// witness radius is half its nearest-neighbour distance, where the shell is
// provably empty for every c.
// ---------------------------------------------------------------------------
struct UPGrid {
    std::size_t radii_per_octave = 1;  // 1 keeps the dyadic grid exact
    double c_resolution = 1e-3;        // bisection width on the reported c
};

enum class UPVerdict { uniformly_perfect_at_resolution, fails };

struct UPWitness {
    Vec a;
    double r = 0.0;
};

struct UPReport {
    UPVerdict verdict = UPVerdict::fails;
    double c_best = 0.0;      // largest c passing every tested cell (bisected)
    double c_supremum = 0.0;  // exact sup of passing c at this resolution
    double m_bound = std::numeric_limits<double>::infinity();
    UPWitness witness;        // populated only when verdict == fails
    bool infinity_in_set = false;
    std::size_t point_count = 0;   // distinct finite samples
    std::size_t radius_count = 0;  // size of the dyadic radius grid
    double min_gap = 0.0;          // smallest pairwise distance
    double finite_diameter = 0.0;  // diameter of the finite samples
    UPGrid grid;
};

inline UPReport uniform_perfectness_analyze(const std::vector<Vec>& samples,
                                            bool contains_infinity, Dimension dim,
                                            const UPGrid& grid = {}) {
    const std::size_t n = static_cast<std::size_t>(dim.value());
    if (grid.radii_per_octave < 1)
        throw domain_error("uniform_perfectness_analyze: radii_per_octave must be >= 1");
    if (!(grid.c_resolution > 0.0) || grid.c_resolution >= 1.0)
        throw domain_error("uniform_perfectness_analyze: c_resolution must lie in (0, 1)");
    for (const Vec& p : samples) {
        if (p.size() != n)
            throw domain_error("uniform_perfectness_analyze: sample dimension mismatch");
        if (!detail::all_finite(p))
            throw domain_error("uniform_perfectness_analyze: samples must be finite points");
    }

    // Exact duplicates carry no information and would break the log grid.
    std::vector<Vec> pts = samples;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    if (pts.size() + (contains_infinity ? 1u : 0u) < 2)
        throw domain_error("uniform_perfectness_analyze: need at least two points");

    UPReport report;
    report.infinity_in_set = contains_infinity;
    report.point_count = pts.size();
    report.grid = grid;

    // A two-point set is nowhere perfect: any shell strictly inside the
    // single gap is empty for every c.
    if (pts.size() == 1) {
        report.witness = UPWitness{pts.front(), 1.0};
        return report;
    }

    const std::size_t m = pts.size();
    std::vector<std::vector<double>> dists(m);
    double d_min = std::numeric_limits<double>::infinity();
    double d_max = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        dists[i].reserve(m - 1);
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            const double d = detail::dist(pts[i], pts[j]);
            dists[i].push_back(d);
            d_min = std::min(d_min, d);
            d_max = std::max(d_max, d);
        }
        std::sort(dists[i].begin(), dists[i].end());
    }
    report.min_gap = d_min;
    report.finite_diameter = d_max;

    if (pts.size() == 2) {
        report.witness = UPWitness{pts.front(), 0.5 * d_min};
        return report;
    }

    // Dyadic radius grid anchored at the minimum gap. Without infinity the
    // definition needs r strictly below the diameter; with infinity every
    // finite radius is admissible, but the data cannot testify beyond its
    // own extent, so the grid still stops there.
    std::vector<double> radii;
    const std::size_t k = grid.radii_per_octave;
    for (std::size_t j = 0;; ++j) {
        const double r = (k == 1) ? d_min * std::ldexp(1.0, static_cast<int>(j))
                                  : d_min * std::pow(2.0, static_cast<double>(j) / k);
        const bool admissible = contains_infinity ? (r <= d_max) : (r < d_max);
        if (!admissible) break;
        radii.push_back(r);
        if (radii.size() > 4096)
            throw resolution_error("uniform_perfectness_analyze: radius grid exceeds 4096 "
                                   "values; the sample spans too many scales");
    }
    report.radius_count = radii.size();

    double min_ratio = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double nearest = dists[i].front();
        bool tested = false;
        for (const double r : radii) {
            if (!(r > nearest)) continue;
            // Largest sample distance strictly below r: the shell (c r, r)
            // is inhabited exactly when c r stays below it.
            const auto it = std::lower_bound(dists[i].begin(), dists[i].end(), r);
            const double d_lo = *(it - 1);
            min_ratio = std::min(min_ratio, d_lo / r);
            tested = true;
        }
        if (!tested) {
            // No admissible radius can see past this point's isolation.
            report.witness = UPWitness{pts[i], 0.5 * nearest};
            return report;
        }
    }
    report.c_supremum = min_ratio;

    // The feasible set is {c < min_ratio}; bisect anyway so the reported
    // value honestly reflects the requested resolution.
    double lo = 0.0, hi = 1.0;
    while (hi - lo > grid.c_resolution) {
        const double mid = 0.5 * (lo + hi);
        (mid < min_ratio ? lo : hi) = mid;
    }

    const ModulusBracket a = a_constant(dim);
    report.verdict = UPVerdict::uniformly_perfect_at_resolution;
    report.c_best = lo;
    if (lo > 0.0)
        report.m_bound = contains_infinity ? a.hi - std::log(lo)
                                           : a.hi + std::log(3.0 / lo);
    return report;
}

// The converse direction: sets admitting no separating ring of modulus
// above M satisfy the shell condition with this c.
inline double converse_c_from_M(double m_bound) {
    if (!(m_bound > 0.0))
        throw domain_error("converse_c_from_M: need M > 0, got " + std::to_string(m_bound));
    return std::min(std::exp(-m_bound), 0.5);
}

// ---------------------------------------------------------------------------
// Semiring diameter bounds. One of the two plates of a semiring in the unit
// ball is small once the modulus is large; nothing in the ball has diameter
// above 2, hence the cap. The hyperplane-bounded variant is sharper and is
// attained exactly by the symmetric canonical semiring.
// ---------------------------------------------------------------------------
inline double semiring_min_diameter_bound(Dimension dim, double mod_s) {
    if (!(mod_s >= 0.0))
        throw domain_error("semiring_min_diameter_bound: need mod >= 0, got " +
                           std::to_string(mod_s));
    return std::min(2.0, q_constant(dim).hi * std::exp(-0.5 * mod_s));
}

inline double semiring_min_diameter_bound_hyperplane(double mod_t) {
    if (!(mod_t >= 0.0))
        throw domain_error("semiring_min_diameter_bound_hyperplane: need mod >= 0, got " +
                           std::to_string(mod_t));
    return 2.0 / std::cosh(0.5 * mod_t);
}

} // namespace ringmod
