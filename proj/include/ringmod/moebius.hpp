#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "ringmod/errors.hpp"

namespace ringmod {

// Coordinate vector; used for points and directions alike throughout the
// geometry layer.
using Vec = std::vector<double>;

namespace detail {

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm_sq(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm_sq(a)); }

inline Vec add(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec scaled(const Vec& a, double f) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = f * a[i];
    return r;
}

inline double dist(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline bool all_finite(const Vec& a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

inline void require_same_dim(const Vec& a, const Vec& b, const char* who) {
    if (a.size() != b.size())
        throw domain_error(std::string(who) + ": dimension mismatch (" +
                           std::to_string(a.size()) + " vs " +
                           std::to_string(b.size()) + ")");
}

}  // namespace detail

// Point of the one-point compactification of R^n. The infinite point is a
// tagged value carrying no coordinates; every Moebius generator knows what
// to do with it, which keeps the maps total.
struct ExtPoint {
    Vec coords;             // empty when infinite
    bool infinite = false;

    static ExtPoint finite(Vec c) {
        if (!detail::all_finite(c))
            throw domain_error("ExtPoint: finite point with a non-finite coordinate");
        ExtPoint p;
        p.coords = std::move(c);
        return p;
    }

    static ExtPoint at_infinity() {
        ExtPoint p;
        p.infinite = true;
        return p;
    }

    bool is_infinite() const { return infinite; }
    std::size_t dim() const { return coords.size(); }

    double norm() const {
        return infinite ? std::numeric_limits<double>::infinity()
                        : detail::norm(coords);
    }
};

namespace detail {

// Points whose squared distance to a reflection pole falls below this
// (relative to the sphere's scale) are snapped to infinity. Rotating the
// exact pole in floating point leaves it a few ulp off target; without the
// snap a composed map would hand back garbage coordinates of order 1e30
// instead of the intended point at infinity.
constexpr double kPoleSnapSq = 1e-28;

// Reflection in the sphere of radius sqrt(radius_sq) about center:
// x -> center + radius_sq (x - center)/|x - center|^2, center <-> infinity.
struct SphereReflectionGen {
    Vec center;
    double radius_sq;
};

// Reflection across the hyperplane {x . normal = offset}, unit normal.
struct PlaneReflectionGen {
    Vec normal;
    double offset;
};

// Orthogonal matrix, row-major.
struct RotationGen {
    std::size_t n;
    std::vector<double> m;
};

// x -> scale x + shift, scale nonzero.
struct AffineGen {
    double scale;
    Vec shift;
};

using MoebiusGen =
    std::variant<SphereReflectionGen, PlaneReflectionGen, RotationGen, AffineGen>;

inline std::size_t gen_dim(const MoebiusGen& g) {
    return std::visit(
        [](const auto& gen) -> std::size_t {
            using T = std::decay_t<decltype(gen)>;
            if constexpr (std::is_same_v<T, SphereReflectionGen>)
                return gen.center.size();
            else if constexpr (std::is_same_v<T, PlaneReflectionGen>)
                return gen.normal.size();
            else if constexpr (std::is_same_v<T, RotationGen>)
                return gen.n;
            else
                return gen.shift.size();
        },
        g);
}

inline ExtPoint apply_gen(const SphereReflectionGen& g, const ExtPoint& x) {
    ExtPoint p;
    if (x.is_infinite()) {
        p.coords = g.center;
        return p;
    }
    const Vec d = sub(x.coords, g.center);
    const double d2 = norm_sq(d);
    if (d2 <= kPoleSnapSq * (1.0 + norm_sq(g.center))) return ExtPoint::at_infinity();
    const double f = g.radius_sq / d2;
    p.coords = g.center;
    for (std::size_t i = 0; i < p.coords.size(); ++i) p.coords[i] += f * d[i];
    return p;
}

inline ExtPoint apply_gen(const PlaneReflectionGen& g, const ExtPoint& x) {
    if (x.is_infinite()) return x;
    ExtPoint p = x;
    const double h = dot(p.coords, g.normal) - g.offset;
    for (std::size_t i = 0; i < p.coords.size(); ++i)
        p.coords[i] -= 2.0 * h * g.normal[i];
    return p;
}

inline ExtPoint apply_gen(const RotationGen& g, const ExtPoint& x) {
    if (x.is_infinite()) return x;
    ExtPoint p;
    p.coords.assign(g.n, 0.0);
    for (std::size_t i = 0; i < g.n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < g.n; ++j) s += g.m[i * g.n + j] * x.coords[j];
        p.coords[i] = s;
    }
    return p;
}

inline ExtPoint apply_gen(const AffineGen& g, const ExtPoint& x) {
    if (x.is_infinite()) return x;
    ExtPoint p;
    p.coords.resize(g.shift.size());
    for (std::size_t i = 0; i < p.coords.size(); ++i)
        p.coords[i] = g.scale * x.coords[i] + g.shift[i];
    return p;
}

inline MoebiusGen invert_gen(const MoebiusGen& g) {
    return std::visit(
        [](const auto& gen) -> MoebiusGen {
            using T = std::decay_t<decltype(gen)>;
            if constexpr (std::is_same_v<T, RotationGen>) {
                RotationGen t{gen.n, std::vector<double>(gen.n * gen.n)};
                for (std::size_t i = 0; i < gen.n; ++i)
                    for (std::size_t j = 0; j < gen.n; ++j)
                        t.m[j * gen.n + i] = gen.m[i * gen.n + j];
                return t;
            } else if constexpr (std::is_same_v<T, AffineGen>) {
                return AffineGen{1.0 / gen.scale, scaled(gen.shift, -1.0 / gen.scale)};
            } else {
                // both reflections are involutions
                return gen;
            }
        },
        g);
}

}  // namespace detail

// Composition of Moebius generators, applied first to last. Total on the
// extended space: reflection poles go to infinity and come back.
class MoebiusMap {
public:
    MoebiusMap() = default;  // identity, valid in every dimension

    // x -> x/|x|^2 about the origin of R^n.
    static MoebiusMap inversion(std::size_t n) {
        return sphere_reflection(Vec(n, 0.0), 1.0);
    }

    // x -> a + (x - a)/|x - a|^2, the unit-radius inversion centered at a.
    static MoebiusMap translated_inversion(Vec a) {
        return sphere_reflection(std::move(a), 1.0);
    }

    static MoebiusMap sphere_reflection(Vec center, double radius) {
        if (center.empty() || !detail::all_finite(center))
            throw domain_error("sphere_reflection: center must be finite and non-empty");
        if (!(radius > 0.0) || !std::isfinite(radius))
            throw domain_error("sphere_reflection: radius must be positive, got " +
                               std::to_string(radius));
        return single(detail::SphereReflectionGen{std::move(center), radius * radius});
    }

    // Reflection across {x . normal = offset}; normal need not be unit.
    static MoebiusMap plane_reflection(Vec normal, double offset) {
        const double len = detail::norm(normal);
        if (!(len > 0.0) || !detail::all_finite(normal) || !std::isfinite(offset))
            throw domain_error("plane_reflection: normal must be a nonzero finite vector");
        for (double& v : normal) v /= len;
        return single(detail::PlaneReflectionGen{std::move(normal), offset / len});
    }

    static MoebiusMap rotation(std::vector<double> row_major, std::size_t n) {
        if (n == 0 || row_major.size() != n * n)
            throw domain_error("rotation: matrix must be n x n");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                    s += row_major[k * n + i] * row_major[k * n + j];
                if (std::abs(s - (i == j ? 1.0 : 0.0)) > 1e-10)
                    throw domain_error("rotation: matrix is not orthogonal");
            }
        return single(detail::RotationGen{n, std::move(row_major)});
    }

    static MoebiusMap affine(double scale, Vec shift) {
        if (scale == 0.0 || !std::isfinite(scale) || shift.empty() ||
            !detail::all_finite(shift))
            throw domain_error("affine: need a nonzero finite scale and finite shift");
        return single(detail::AffineGen{scale, std::move(shift)});
    }

    // This map first, then `next`.
    MoebiusMap then(const MoebiusMap& next) const {
        MoebiusMap r = *this;
        if (!next.gens_.empty()) {
            if (!r.gens_.empty() && r.dim() != next.dim())
                throw domain_error("MoebiusMap::then: dimension mismatch");
            r.gens_.insert(r.gens_.end(), next.gens_.begin(), next.gens_.end());
        }
        return r;
    }

    MoebiusMap inverse() const {
        MoebiusMap r;
        r.gens_.reserve(gens_.size());
        for (auto it = gens_.rbegin(); it != gens_.rend(); ++it)
            r.gens_.push_back(detail::invert_gen(*it));
        return r;
    }

    std::size_t dim() const { return gens_.empty() ? 0 : detail::gen_dim(gens_.front()); }
    bool is_identity() const { return gens_.empty(); }

    ExtPoint operator()(ExtPoint x) const {
        if (!gens_.empty() && !x.is_infinite() && x.dim() != dim())
            throw domain_error("MoebiusMap: point dimension " + std::to_string(x.dim()) +
                               " does not match map dimension " + std::to_string(dim()));
        for (const auto& g : gens_)
            x = std::visit([&x](const auto& gen) { return detail::apply_gen(gen, x); }, g);
        return x;
    }

    // Convenience for callers that know the image is finite.
    Vec operator()(const Vec& x) const {
        ExtPoint p;
        p.coords = x;
        ExtPoint y = (*this)(std::move(p));
        if (y.is_infinite())
            throw domain_error("MoebiusMap: image is the point at infinity");
        return std::move(y.coords);
    }

private:
    static MoebiusMap single(detail::MoebiusGen g) {
        MoebiusMap m;
        m.gens_.push_back(std::move(g));
        return m;
    }

    std::vector<detail::MoebiusGen> gens_;
};

// Moebius map carrying the open unit ball onto the upper half-space
// {x_n > 0}, with xi going to infinity and -xi to the origin. Composition:
// rotate xi onto e_n, reflect in the sphere of radius sqrt(2) about e_n,
// then flip the sign of the last coordinate. The image norm satisfies
// |M(x)| = |x + xi| / |x - xi|, which is the identity every caller relies on.
inline MoebiusMap moebius_to_halfspace(const Vec& xi) {
    const std::size_t n = xi.size();
    if (n < 2)
        throw domain_error("moebius_to_halfspace: need dimension >= 2");
    const double len = detail::norm(xi);
    if (std::abs(len - 1.0) > 1e-12)
        throw domain_error("moebius_to_halfspace: direction must be a unit vector, |xi| = " +
                           std::to_string(len));
    const Vec a = detail::scaled(xi, 1.0 / len);

    MoebiusMap m;
    const double c = a[n - 1];
    Vec w = detail::scaled(a, -c);
    w[n - 1] += 1.0;  // e_n - (a . e_n) a, the leg orthogonal to a
    const double s = detail::norm(w);
    if (s > 1e-12) {
        // Plane rotation by the angle between a and e_n inside span{a, b},
        // fixing the orthogonal complement pointwise:
        //   R = I + (c - 1)(aa^T + bb^T) + s(ba^T - ab^T).
        // One Gram-Schmidt pass keeps b orthogonal to a even when s is small.
        const double wa = detail::dot(w, a);
        Vec b(n);
        for (std::size_t i = 0; i < n; ++i) b[i] = w[i] - wa * a[i];
        const double bl = detail::norm(b);
        for (double& v : b) v /= bl;
        std::vector<double> r(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                r[i * n + j] = (i == j ? 1.0 : 0.0) + (c - 1.0) * (a[i] * a[j] + b[i] * b[j]) +
                               s * (b[i] * a[j] - a[i] * b[j]);
        m = MoebiusMap::rotation(std::move(r), n);
    } else if (c < 0.0) {
        // xi = -e_n: rotate by pi in the (e_{n-1}, e_n) coordinate plane.
        std::vector<double> r(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) r[i * n + i] = i + 2 >= n ? -1.0 : 1.0;
        m = MoebiusMap::rotation(std::move(r), n);
    }
    // else xi is already e_n and there is nothing to rotate.

    Vec en(n, 0.0);
    en[n - 1] = 1.0;
    m = m.then(MoebiusMap::sphere_reflection(en, std::sqrt(2.0)));
    return m.then(MoebiusMap::plane_reflection(std::move(en), 0.0));
}

// Poincare-ball distance for the metric with density 2/(1 - |x|^2):
//   h(x, y) = 2 asinh( |x - y| / sqrt((1 - |x|^2)(1 - |y|^2)) ).
// The asinh form keeps full accuracy for nearby points, where the classical
// arccosh formula loses half the digits.
inline double hyperbolic_distance(const Vec& x, const Vec& y) {
    detail::require_same_dim(x, y, "hyperbolic_distance");
    const double x2 = detail::norm_sq(x);
    const double y2 = detail::norm_sq(y);
    if (x2 >= 1.0 || y2 >= 1.0)
        throw domain_error("hyperbolic_distance: points must lie inside the unit ball");
    const double q = detail::dist(x, y) / std::sqrt((1.0 - x2) * (1.0 - y2));
    return 2.0 * std::asinh(q);
}

inline double hyperbolic_distance(const ExtPoint& x, const ExtPoint& y) {
    if (x.is_infinite() || y.is_infinite())
        throw domain_error("hyperbolic_distance: points must lie inside the unit ball");
    return hyperbolic_distance(x.coords, y.coords);
}

}  // namespace ringmod
