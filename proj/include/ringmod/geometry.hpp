#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ringmod/bracket.hpp"
#include "ringmod/errors.hpp"
#include "ringmod/moebius.hpp"

namespace ringmod {

// ---------------------------------------------------------------------------
// Primitives. A continuum is a finite union of these; each one is connected
// on its own, so connectivity of the union reduces to a chain condition on
// pairwise set distances, all of which have closed forms.
// ---------------------------------------------------------------------------

// Closed round ball, or the closed complement of its interior when
// `complement` is set (the piece that owns the point at infinity).
struct Ball {
    Vec center;
    double radius = 0.0;
    bool complement = false;
};

struct Segment {
    Vec a;
    Vec b;
};

// origin + t * direction for t >= 0; the direction is stored normalized.
struct Ray {
    Vec origin;
    Vec direction;
};

// Chain of segments through consecutive vertices.
struct Polyline {
    std::vector<Vec> vertices;
};

using Primitive = std::variant<Ball, Segment, Ray, Polyline>;

namespace detail {

inline double point_to_segment(const Vec& x, const Vec& a, const Vec& b) {
    const Vec d = sub(b, a);
    const double dd = norm_sq(d);
    double t = dd > 0.0 ? dot(sub(x, a), d) / dd : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = x[i] - (a[i] + t * d[i]);
        s += e * e;
    }
    return std::sqrt(s);
}

inline double point_to_ray(const Vec& x, const Vec& o, const Vec& u) {
    const double t = std::max(0.0, dot(sub(x, o), u));
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = x[i] - (o[i] + t * u[i]);
        s += e * e;
    }
    return std::sqrt(s);
}

// Distance from the point x to the primitive (as a point set).
inline double point_distance(const Primitive& p, const Vec& x) {
    if (const auto* b = std::get_if<Ball>(&p)) {
        const double d = dist(x, b->center);
        return b->complement ? std::max(0.0, b->radius - d)
                             : std::max(0.0, d - b->radius);
    }
    if (const auto* s = std::get_if<Segment>(&p)) return point_to_segment(x, s->a, s->b);
    if (const auto* r = std::get_if<Ray>(&p)) return point_to_ray(x, r->origin, r->direction);
    const auto& pl = std::get<Polyline>(p);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < pl.vertices.size(); ++i)
        best = std::min(best, point_to_segment(x, pl.vertices[i], pl.vertices[i + 1]));
    return best;
}

// Supremum of |y - x| over the primitive; infinite for unbounded ones.
inline double point_max_distance(const Primitive& p, const Vec& x) {
    if (const auto* b = std::get_if<Ball>(&p)) {
        if (b->complement) return std::numeric_limits<double>::infinity();
        return dist(x, b->center) + b->radius;
    }
    if (const auto* s = std::get_if<Segment>(&p))
        return std::max(dist(x, s->a), dist(x, s->b));
    if (std::get_if<Ray>(&p)) return std::numeric_limits<double>::infinity();
    const auto& pl = std::get<Polyline>(p);
    double best = 0.0;
    for (const Vec& v : pl.vertices) best = std::max(best, dist(x, v));
    return best;
}

inline bool prim_unbounded(const Primitive& p) {
    if (const auto* b = std::get_if<Ball>(&p)) return b->complement;
    return std::holds_alternative<Ray>(p);
}

// Finite scale proxy (max |x| over the primitive's bounded skeleton): used
// to pick tolerances and ray sampling cutoffs, not as a geometric bound.
inline double prim_extent(const Primitive& p) {
    if (const auto* b = std::get_if<Ball>(&p)) return norm(b->center) + b->radius;
    if (const auto* s = std::get_if<Segment>(&p))
        return std::max(norm(s->a), norm(s->b));
    if (const auto* r = std::get_if<Ray>(&p)) return norm(r->origin);
    const auto& pl = std::get<Polyline>(p);
    double best = 0.0;
    for (const Vec& v : pl.vertices) best = std::max(best, norm(v));
    return best;
}

inline std::size_t prim_dim(const Primitive& p) {
    if (const auto* b = std::get_if<Ball>(&p)) return b->center.size();
    if (const auto* s = std::get_if<Segment>(&p)) return s->a.size();
    if (const auto* r = std::get_if<Ray>(&p)) return r->origin.size();
    const auto& pl = std::get<Polyline>(p);
    return pl.vertices.empty() ? 0 : pl.vertices.front().size();
}

// Shortest distance between the parameter-clamped lines p + s u (0<=s<=smax)
// and q + t v (0<=t<=tmax); smax or tmax may be infinite for rays. Standard
// closest-point reduction with a clamp-and-reproject pass for the boundary
// cases.
inline double clamped_lines_distance(const Vec& p, const Vec& u, double smax,
                                     const Vec& q, const Vec& v, double tmax) {
    const double a = norm_sq(u);
    const double c = norm_sq(v);
    const double b = dot(u, v);
    const Vec w = sub(p, q);
    const double d = dot(u, w);
    const double e = dot(v, w);
    const auto point_gap = [](const Vec& base, const Vec& dir, double t, const Vec& other) {
        double s = 0.0;
        for (std::size_t i = 0; i < base.size(); ++i) {
            const double g = base[i] + t * dir[i] - other[i];
            s += g * g;
        }
        return std::sqrt(s);
    };
    if (a == 0.0 && c == 0.0) return norm(w);
    if (a == 0.0) return point_gap(q, v, std::clamp(e / c, 0.0, tmax), p);
    if (c == 0.0) return point_gap(p, u, std::clamp(-d / a, 0.0, smax), q);
    const double denom = a * c - b * b;
    double s = denom > 1e-14 * a * c ? std::clamp((b * e - c * d) / denom, 0.0, smax) : 0.0;
    const double t = std::clamp((b * s + e) / c, 0.0, tmax);
    s = std::clamp((b * t - d) / a, 0.0, smax);
    double g2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double g = p[i] + s * u[i] - q[i] - t * v[i];
        g2 += g * g;
    }
    return std::sqrt(g2);
}

struct ParamEdge {
    Vec base;
    Vec dir;
    double tmax;
};

inline void collect_edges(const Primitive& p, std::vector<ParamEdge>& out) {
    if (const auto* s = std::get_if<Segment>(&p)) {
        out.push_back({s->a, sub(s->b, s->a), 1.0});
        return;
    }
    if (const auto* r = std::get_if<Ray>(&p)) {
        out.push_back({r->origin, r->direction, std::numeric_limits<double>::infinity()});
        return;
    }
    const auto& pl = std::get<Polyline>(p);
    for (std::size_t i = 0; i + 1 < pl.vertices.size(); ++i)
        out.push_back({pl.vertices[i], sub(pl.vertices[i + 1], pl.vertices[i]), 1.0});
}

// Exact distance between two primitives as point sets. Balls reduce to point
// distances (a solid ball is everything within radius of its center, the
// complement everything beyond), the rest to clamped line pairs.
inline double pair_distance(const Primitive& p, const Primitive& q) {
    if (const auto* b = std::get_if<Ball>(&p)) {
        if (!b->complement)
            return std::max(0.0, point_distance(q, b->center) - b->radius);
        const double far = point_max_distance(q, b->center);
        return std::isinf(far) ? 0.0 : std::max(0.0, b->radius - far);
    }
    if (std::holds_alternative<Ball>(q)) return pair_distance(q, p);
    std::vector<ParamEdge> ep, eq;
    collect_edges(p, ep);
    collect_edges(q, eq);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& x : ep)
        for (const auto& y : eq)
            best = std::min(best, clamped_lines_distance(x.base, x.dir, x.tmax,
                                                         y.base, y.dir, y.tmax));
    return best;
}

inline void collect_vertices(const Primitive& p, std::vector<const Vec*>& out) {
    if (const auto* s = std::get_if<Segment>(&p)) {
        out.push_back(&s->a);
        out.push_back(&s->b);
        return;
    }
    const auto& pl = std::get<Polyline>(p);
    for (const Vec& v : pl.vertices) out.push_back(&v);
}

// sup |x - y| over x in p, y in q. |x - y| is convex in each argument, so
// over segments and polylines the supremum sits at vertices, and a ball
// contributes its radius on top of the distance to its center.
inline double pair_sup_distance(const Primitive& p, const Primitive& q) {
    if (prim_unbounded(p) || prim_unbounded(q))
        return std::numeric_limits<double>::infinity();
    if (const auto* b = std::get_if<Ball>(&p)) {
        if (const auto* b2 = std::get_if<Ball>(&q))
            return dist(b->center, b2->center) + b->radius + b2->radius;
        std::vector<const Vec*> vs;
        collect_vertices(q, vs);
        double best = 0.0;
        for (const Vec* v : vs) best = std::max(best, dist(*v, b->center) + b->radius);
        return best;
    }
    if (std::holds_alternative<Ball>(q)) return pair_sup_distance(q, p);
    std::vector<const Vec*> vp, vq;
    collect_vertices(p, vp);
    collect_vertices(q, vq);
    double best = 0.0;
    for (const Vec* x : vp)
        for (const Vec* y : vq) best = std::max(best, dist(*x, *y));
    return best;
}

// Deterministic unit directions: an angle grid in the plane, a Fibonacci
// lattice on the 2-sphere, and seeded Gaussian directions above that (the
// clouds only feed membership-style checks there, never quadrature).
inline std::vector<Vec> sphere_directions(std::size_t n, std::size_t count) {
    std::vector<Vec> dirs;
    dirs.reserve(count);
    const double pi = 3.14159265358979323846;
    if (n == 2) {
        for (std::size_t k = 0; k < count; ++k) {
            const double th = 2.0 * pi * static_cast<double>(k) / static_cast<double>(count);
            dirs.push_back({std::cos(th), std::sin(th)});
        }
        return dirs;
    }
    if (n == 3) {
        const double golden = pi * (3.0 - std::sqrt(5.0));
        for (std::size_t k = 0; k < count; ++k) {
            const double z = 1.0 - (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(count);
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * static_cast<double>(k);
            dirs.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
        }
        return dirs;
    }
    std::mt19937_64 rng(1234567u + 31u * static_cast<unsigned>(n));
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (dirs.size() < count) {
        Vec v(n);
        for (double& x : v) x = gauss(rng);
        const double len = norm(v);
        if (len < 1e-12) continue;
        for (double& x : v) x /= len;
        dirs.push_back(std::move(v));
    }
    return dirs;
}

constexpr std::size_t kMaxSamplesPerPrimitive = 400000;

inline void append_samples(const Primitive& p, double spacing, double ray_length,
                           std::vector<Vec>& out) {
    const std::size_t n = prim_dim(p);
    if (const auto* b = std::get_if<Ball>(&p)) {
        // Both orientations sample the boundary sphere; the far side of a
        // complement ball never matters because every exact query goes
        // through the distance functions. Counts are calibrated for n <= 3
        // and reused above that.
        std::size_t count;
        const double pi = 3.14159265358979323846;
        if (n == 2) {
            count = static_cast<std::size_t>(std::ceil(2.0 * pi * b->radius / spacing));
            count = std::clamp<std::size_t>(count, 16, kMaxSamplesPerPrimitive);
        } else {
            const double q = b->radius / spacing;
            count = static_cast<std::size_t>(std::ceil(4.0 * pi * q * q));
            count = std::clamp<std::size_t>(count, 64, kMaxSamplesPerPrimitive);
        }
        for (Vec& d : sphere_directions(n, count)) {
            for (std::size_t i = 0; i < n; ++i) d[i] = b->center[i] + b->radius * d[i];
            out.push_back(std::move(d));
        }
        return;
    }
    const auto emit_segment = [&](const Vec& a, const Vec& bb, bool skip_first) {
        const double len = dist(a, bb);
        std::size_t k = static_cast<std::size_t>(std::ceil(len / spacing));
        k = std::clamp<std::size_t>(k, 1, kMaxSamplesPerPrimitive);
        for (std::size_t i = skip_first ? 1 : 0; i <= k; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(k);
            Vec x(n);
            for (std::size_t j = 0; j < n; ++j) x[j] = a[j] + t * (bb[j] - a[j]);
            out.push_back(std::move(x));
        }
    };
    if (const auto* s = std::get_if<Segment>(&p)) {
        emit_segment(s->a, s->b, false);
        return;
    }
    if (const auto* r = std::get_if<Ray>(&p)) {
        Vec tip(n);
        for (std::size_t j = 0; j < n; ++j)
            tip[j] = r->origin[j] + ray_length * r->direction[j];
        emit_segment(r->origin, tip, false);
        return;
    }
    const auto& pl = std::get<Polyline>(p);
    for (std::size_t i = 0; i + 1 < pl.vertices.size(); ++i)
        emit_segment(pl.vertices[i], pl.vertices[i + 1], i > 0);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Continuum: a connected union of primitives together with the side of the
// compactification it owns. Distances and diameters are exact; samples are
// for membership-style consumers.
// ---------------------------------------------------------------------------
class Continuum {
public:
    Continuum(std::vector<Primitive> prims, bool contains_infinity)
        : prims_(std::move(prims)), infinity_(contains_infinity) {
        if (prims_.empty()) throw domain_error("Continuum: needs at least one primitive");
        dim_ = detail::prim_dim(prims_.front());
        for (auto& p : prims_) validate(p);
        unbounded_ = false;
        extent_ = 0.0;
        for (const auto& p : prims_) {
            unbounded_ = unbounded_ || detail::prim_unbounded(p);
            extent_ = std::max(extent_, detail::prim_extent(p));
        }
        if (infinity_ && !unbounded_)
            throw domain_error("Continuum: contains_infinity set but every primitive is bounded");
        if (!infinity_ && unbounded_)
            throw domain_error("Continuum: an unbounded primitive forces the point at infinity into the set");
    }

    std::size_t ambient_dim() const { return dim_; }
    bool contains_infinity() const { return infinity_; }
    bool unbounded() const { return unbounded_; }
    const std::vector<Primitive>& primitives() const { return prims_; }

    // Finite scale proxy used for tolerances and sampling cutoffs.
    double extent() const { return extent_; }

    // Exact distance from x to the set.
    double distance(const Vec& x) const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : prims_) best = std::min(best, detail::point_distance(p, x));
        return best;
    }

    // Exact sup of |y - x| over the set; infinite when unbounded.
    double max_distance(const Vec& x) const {
        double best = 0.0;
        for (const auto& p : prims_)
            best = std::max(best, detail::point_max_distance(p, x));
        return best;
    }

    // Exact diameter; infinite when unbounded.
    double diameter() const {
        if (unbounded_) return std::numeric_limits<double>::infinity();
        double best = 0.0;
        for (std::size_t i = 0; i < prims_.size(); ++i)
            for (std::size_t j = i; j < prims_.size(); ++j)
                best = std::max(best, detail::pair_sup_distance(prims_[i], prims_[j]));
        return best;
    }

    // A point guaranteed to lie in the set.
    Vec anchor_point() const {
        const Primitive& p = prims_.front();
        if (const auto* b = std::get_if<Ball>(&p)) {
            if (!b->complement) return b->center;
            Vec x = b->center;
            x[0] += b->radius;
            return x;
        }
        if (const auto* s = std::get_if<Segment>(&p)) return s->a;
        if (const auto* r = std::get_if<Ray>(&p)) return r->origin;
        return std::get<Polyline>(p).vertices.front();
    }

    // Point cloud at the requested spacing. Rays are truncated at a cutoff
    // proportional to the scene scale; exact queries are unaffected.
    std::vector<Vec> sample(double max_spacing) const {
        if (!(max_spacing > 0.0))
            throw domain_error("Continuum::sample: spacing must be positive");
        std::vector<Vec> out;
        const double ray_len = 4.0 * std::max(1.0, extent_);
        for (const auto& p : prims_)
            detail::append_samples(p, max_spacing, ray_len, out);
        return out;
    }

    std::vector<Vec> sample() const {
        const double d = unbounded_ ? extent_ : diameter();
        return sample(1e-3 * std::max(1.0, d));
    }

    // Certifies that every primitive links to the first one through gaps of
    // at most link_tolerance. Pairwise set distances are closed forms, so
    // this is a certificate rather than a sampling heuristic.
    void certify_connected(double link_tolerance) const {
        const std::size_t m = prims_.size();
        std::vector<std::size_t> root(m);
        std::iota(root.begin(), root.end(), 0);
        const auto find = [&root](std::size_t i) {
            while (root[i] != i) {
                root[i] = root[root[i]];
                i = root[i];
            }
            return i;
        };
        std::vector<std::vector<double>> gap(m, std::vector<double>(m, 0.0));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                gap[i][j] = detail::pair_distance(prims_[i], prims_[j]);
                if (gap[i][j] <= link_tolerance) root[find(i)] = find(j);
            }
        std::size_t components = 0;
        for (std::size_t i = 0; i < m; ++i) components += find(i) == i ? 1 : 0;
        if (components <= 1) return;
        double bridge = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
                if (find(i) != find(j)) bridge = std::min(bridge, gap[i][j]);
        throw domain_error("Continuum: not connected (" + std::to_string(components) +
                           " pieces at tolerance " + std::to_string(link_tolerance) +
                           ", smallest bridging gap " + std::to_string(bridge) + ")");
    }

private:
    void validate(Primitive& p) const {
        if (detail::prim_dim(p) != dim_)
            throw domain_error("Continuum: primitives live in different dimensions");
        if (const auto* b = std::get_if<Ball>(&p)) {
            if (!(b->radius > 0.0) || !std::isfinite(b->radius) ||
                !detail::all_finite(b->center))
                throw domain_error("Continuum: ball needs a finite center and positive radius");
            return;
        }
        if (const auto* s = std::get_if<Segment>(&p)) {
            if (!detail::all_finite(s->a) || !detail::all_finite(s->b))
                throw domain_error("Continuum: segment endpoints must be finite");
            return;
        }
        if (auto* r = std::get_if<Ray>(&p)) {
            if (!detail::all_finite(r->origin) || !detail::all_finite(r->direction))
                throw domain_error("Continuum: ray data must be finite");
            const double len = detail::norm(r->direction);
            if (!(len > 0.0))
                throw domain_error("Continuum: ray needs a nonzero direction");
            for (double& v : r->direction) v /= len;
            return;
        }
        const auto& pl = std::get<Polyline>(p);
        if (pl.vertices.size() < 2)
            throw domain_error("Continuum: polyline needs at least two vertices");
        for (const Vec& v : pl.vertices)
            if (!detail::all_finite(v))
                throw domain_error("Continuum: polyline vertices must be finite");
    }

    std::vector<Primitive> prims_;
    bool infinity_ = false;
    std::size_t dim_ = 0;
    bool unbounded_ = false;
    double extent_ = 0.0;
};

// ---------------------------------------------------------------------------
// Rings: a pair of disjoint continua; the ring is everything between them.
// The unbounded side, when present, is C1 by convention.
// ---------------------------------------------------------------------------
class RingGeometry {
public:
    RingGeometry(Continuum c0, Continuum c1)
        : c0_(std::move(c0)), c1_(std::move(c1)), dim_(checked_dim(c0_, c1_)) {
        if (c0_.contains_infinity())
            throw domain_error("RingGeometry: the component containing infinity must be C1");
        const double scale = std::max({1.0, c0_.extent(), c1_.extent()});
        c0_.certify_connected(1e-9 * scale);
        c1_.certify_connected(1e-9 * scale);
        separation_ = std::numeric_limits<double>::infinity();
        for (const auto& p : c0_.primitives())
            for (const auto& q : c1_.primitives())
                separation_ = std::min(separation_, detail::pair_distance(p, q));
        if (separation_ <= 1e-12 * scale)
            throw domain_error("RingGeometry: components are not disjoint (set distance " +
                               std::to_string(separation_) + ")");
    }

    const Continuum& c0() const { return c0_; }
    const Continuum& c1() const { return c1_; }
    Dimension dim() const { return dim_; }

    // Exact set distance between the two components.
    double separation() const { return separation_; }

private:
    static Dimension checked_dim(const Continuum& a, const Continuum& b) {
        if (a.ambient_dim() != b.ambient_dim())
            throw domain_error("RingGeometry: components live in different dimensions");
        return Dimension(static_cast<int>(a.ambient_dim()));
    }

    Continuum c0_;
    Continuum c1_;
    Dimension dim_;
    double separation_ = 0.0;
};

// Closed unit ball versus the axial ray starting at s e_1.
inline RingGeometry grotzsch_ring(Dimension dim, double s) {
    if (!(s > 1.0) || !std::isfinite(s))
        throw domain_error("grotzsch_ring: need s > 1, got " + std::to_string(s));
    const std::size_t n = static_cast<std::size_t>(dim.value());
    Vec e1(n, 0.0);
    e1[0] = 1.0;
    Vec start(n, 0.0);
    start[0] = s;
    Continuum c0({Ball{Vec(n, 0.0), 1.0, false}}, false);
    Continuum c1({Ray{std::move(start), std::move(e1)}}, true);
    return RingGeometry(std::move(c0), std::move(c1));
}

// Segment [-e_1, 0] versus the axial ray starting at t e_1.
inline RingGeometry teichmuller_ring(Dimension dim, double t) {
    if (!(t > 0.0) || !std::isfinite(t))
        throw domain_error("teichmuller_ring: need t > 0, got " + std::to_string(t));
    const std::size_t n = static_cast<std::size_t>(dim.value());
    Vec minus_e1(n, 0.0);
    minus_e1[0] = -1.0;
    Vec e1(n, 0.0);
    e1[0] = 1.0;
    Vec start(n, 0.0);
    start[0] = t;
    Continuum c0({Segment{std::move(minus_e1), Vec(n, 0.0)}}, false);
    Continuum c1({Ray{std::move(start), std::move(e1)}}, true);
    return RingGeometry(std::move(c0), std::move(c1));
}

enum class CanonicalRing { grotzsch, teichmuller };

inline RingGeometry canonical_ring(CanonicalRing kind, Dimension dim, double parameter) {
    return kind == CanonicalRing::grotzsch ? grotzsch_ring(dim, parameter)
                                           : teichmuller_ring(dim, parameter);
}

// ---------------------------------------------------------------------------
// Round annuli.
// ---------------------------------------------------------------------------
struct Annulus {
    Vec center;
    double r0 = 0.0;
    double r1 = 0.0;

    Annulus(Vec c, double inner, double outer)
        : center(std::move(c)), r0(inner), r1(outer) {
        if (center.empty() || !detail::all_finite(center))
            throw domain_error("Annulus: center must be finite");
        if (!(r0 > 0.0) || !(r1 > r0) || !std::isfinite(r1))
            throw domain_error("Annulus: need 0 < r0 < r1 < infinity");
    }
};

inline double annulus_modulus(const Annulus& a) { return std::log(a.r1 / a.r0); }

// The annulus as a ring: solid inner ball versus the outer complement.
inline RingGeometry annulus_ring(const Annulus& a) {
    Continuum c0({Ball{a.center, a.r0, false}}, false);
    Continuum c1({Ball{a.center, a.r1, true}}, true);
    return RingGeometry(std::move(c0), std::move(c1));
}

// ---------------------------------------------------------------------------
// Semirings: ring domains whose free boundary is a sphere or hyperplane. The
// canonical kinds are exactly solvable; the sampled-image kind only carries
// plate clouds and is priced by the grid solver.
// ---------------------------------------------------------------------------
enum class SemiringKind { canonical, halfspace, image_samples };

// Apollonius coordinate |x - xi| / |x + xi| used by the canonical kind.
inline double apollonius_ratio(const Vec& xi, const Vec& x) {
    detail::require_same_dim(xi, x, "apollonius_ratio");
    return detail::dist(x, xi) / detail::dist(x, detail::scaled(xi, -1.0));
}

class Semiring {
public:
    // {x in the closed unit ball : r0 <= |x - xi|/|x + xi| <= r1}.
    static Semiring canonical(Vec xi, double r0, double r1) {
        if (xi.size() < 2 || std::abs(detail::norm(xi) - 1.0) > 1e-12)
            throw domain_error("Semiring::canonical: xi must be a unit vector");
        if (!(r0 > 0.0) || !(r1 > r0) || !std::isfinite(r1))
            throw domain_error("Semiring::canonical: need 0 < r0 < r1");
        Semiring s;
        s.kind_ = SemiringKind::canonical;
        s.dim_ = xi.size();
        s.xi_ = std::move(xi);
        s.r0_ = r0;
        s.r1_ = r1;
        return s;
    }

    // {x in the upper half-space : 1 <= |x| <= R}.
    static Semiring halfspace(Dimension dim, double ratio) {
        if (!(ratio > 1.0) || !std::isfinite(ratio))
            throw domain_error("Semiring::halfspace: need R > 1, got " + std::to_string(ratio));
        Semiring s;
        s.kind_ = SemiringKind::halfspace;
        s.dim_ = static_cast<std::size_t>(dim.value());
        s.r0_ = 1.0;
        s.r1_ = ratio;
        return s;
    }

    // Plates known only through point clouds (images under some map).
    static Semiring from_samples(std::vector<Vec> plate0, std::vector<Vec> plate1) {
        if (plate0.empty() || plate1.empty())
            throw domain_error("Semiring::from_samples: both plates need samples");
        const std::size_t n = plate0.front().size();
        for (const auto* plate : {&plate0, &plate1})
            for (const Vec& v : *plate)
                if (v.size() != n || !detail::all_finite(v))
                    throw domain_error("Semiring::from_samples: inconsistent sample dimensions");
        Semiring s;
        s.kind_ = SemiringKind::image_samples;
        s.dim_ = n;
        s.plate0_ = std::move(plate0);
        s.plate1_ = std::move(plate1);
        return s;
    }

    SemiringKind kind() const { return kind_; }
    std::size_t ambient_dim() const { return dim_; }
    const Vec& xi() const { return xi_; }
    double r0() const { return r0_; }
    double r1() const { return r1_; }

    // Deterministic point clouds on the two boundary plates; the sampled
    // kind returns its stored clouds as-is. The canonical plates are pulled
    // back from half-space hemispheres through the ball-to-halfspace map,
    // which sends the ratio-r surface onto the sphere of radius 1/r.
    std::pair<std::vector<Vec>, std::vector<Vec>> boundary_samples(std::size_t count) const {
        if (kind_ == SemiringKind::image_samples) return {plate0_, plate1_};
        auto dirs = detail::sphere_directions(dim_, std::max<std::size_t>(count, 8));
        for (Vec& d : dirs)
            if (d[dim_ - 1] < 0.0)
                for (double& v : d) v = -v;
        std::vector<Vec> p0, p1;
        p0.reserve(dirs.size());
        p1.reserve(dirs.size());
        if (kind_ == SemiringKind::halfspace) {
            for (const Vec& d : dirs) {
                p0.push_back(detail::scaled(d, r0_));
                p1.push_back(detail::scaled(d, r1_));
            }
            return {std::move(p0), std::move(p1)};
        }
        const MoebiusMap back = moebius_to_halfspace(xi_).inverse();
        for (const Vec& d : dirs) {
            p0.push_back(back(detail::scaled(d, 1.0 / r0_)));
            p1.push_back(back(detail::scaled(d, 1.0 / r1_)));
        }
        return {std::move(p0), std::move(p1)};
    }

private:
    SemiringKind kind_ = SemiringKind::halfspace;
    std::size_t dim_ = 0;
    Vec xi_;
    double r0_ = 1.0;
    double r1_ = 1.0;
    std::vector<Vec> plate0_, plate1_;
};

inline double semiring_canonical_modulus(const Semiring& s) {
    if (s.kind() == SemiringKind::image_samples)
        throw domain_error(
            "semiring_canonical_modulus: sampled-image semirings have no closed form "
            "(use the grid solver)");
    return std::log(s.r1() / s.r0());
}

// ---------------------------------------------------------------------------
// The ball carved out by the Apollonius condition |x - e_n| <= r |x + e_n|.
// ---------------------------------------------------------------------------
inline Ball apollonian_ball(Dimension dim, double r) {
    if (!(r > 0.0 && r < 1.0))
        throw domain_error("apollonian_ball: need 0 < r < 1, got " + std::to_string(r));
    const std::size_t n = static_cast<std::size_t>(dim.value());
    Vec c(n, 0.0);
    c[n - 1] = (1.0 + r * r) / (1.0 - r * r);
    return Ball{std::move(c), 2.0 * r / (1.0 - r * r), false};
}

}  // namespace ringmod
