#pragma once

#include <cmath>
#include <string>

#include "ringmod/errors.hpp"

namespace ringmod {

// How a numeric interval was obtained. "exact" means lo == hi and the value
// is a closed form; "analytic_bound" means the endpoints are proven bounds;
// "numeric" means the endpoints carry quadrature/discretisation error only.
enum class Provenance { exact, analytic_bound, numeric };

inline const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::exact: return "exact";
        case Provenance::analytic_bound: return "analytic_bound";
        case Provenance::numeric: return "numeric";
    }
    return "?";
}

// Closed interval [lo, hi] tagged with its provenance.
struct ModulusBracket {
    double lo = 0.0;
    double hi = 0.0;
    Provenance provenance = Provenance::numeric;

    static ModulusBracket exact(double v) {
        return ModulusBracket{v, v, Provenance::exact};
    }
    static ModulusBracket analytic(double lo, double hi) {
        check(lo, hi);
        return ModulusBracket{lo, hi, Provenance::analytic_bound};
    }
    static ModulusBracket numeric(double lo, double hi) {
        check(lo, hi);
        return ModulusBracket{lo, hi, Provenance::numeric};
    }

    bool is_exact() const { return provenance == Provenance::exact; }
    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double v) const { return lo <= v && v <= hi; }

    // Image under a strictly increasing map, provenance preserved.
    template <class F>
    ModulusBracket map_increasing(F&& f) const {
        return ModulusBracket{f(lo), f(hi), provenance};
    }
    // Image under a strictly decreasing map (endpoints swap).
    template <class F>
    ModulusBracket map_decreasing(F&& f) const {
        return ModulusBracket{f(hi), f(lo), provenance};
    }

private:
    static void check(double lo, double hi) {
        if (std::isnan(lo) || std::isnan(hi) || lo > hi)
            throw domain_error("bracket endpoints out of order: [" +
                               std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
};

// Dimension of the ambient space. Everything in this library needs n >= 2.
class Dimension {
public:
    explicit Dimension(int n) : n_(n) {
        if (n < 2) throw domain_error("dimension must be >= 2, got " + std::to_string(n));
    }
    int value() const { return n_; }
    bool planar() const { return n_ == 2; }

private:
    int n_;
};

} // namespace ringmod
